#include "homest/rng.hpp"

#include <cmath>
#include <numbers>

namespace homest {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

NormalStream::NormalStream(RngSpec spec) : spec_(spec) {}

double NormalStream::to_unit_interval(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

void NormalStream::refill() {
  block_ = index_ / 2;
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(spec_.stream_index),
                                static_cast<std::uint32_t>(spec_.stream_index >> 32)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(spec_.base_seed),
                            static_cast<std::uint32_t>(spec_.base_seed >> 32)};
  const auto words = Philox4x32::generate(ctr, key);
  // Box–Muller on two 53-bit uniforms.
  const double u1 = to_unit_interval(words[0], words[1]);
  const double u2 = to_unit_interval(words[2], words[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cache_ = {radius * std::cos(angle), radius * std::sin(angle)};
}

double NormalStream::next() {
  if (index_ / 2 != block_) refill();
  return cache_[index_++ % 2];
}

void NormalStream::seek(std::uint64_t index) { index_ = index; }

}  // namespace homest
