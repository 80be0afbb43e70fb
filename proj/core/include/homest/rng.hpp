#pragma once

#include <array>
#include <cstdint>

namespace homest {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Output is a pure function of (counter, key); streams are split through the counter.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Identifies one independent Gaussian stream: same pair → same numbers, bit for bit.
struct RngSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t stream_index = 0;
};

/// Standard normal variates for one stream. Sample i is a pure function of (spec, i), so the
/// sequence does not depend on how many other streams are drawn or on thread scheduling.
class NormalStream {
 public:
  explicit NormalStream(RngSpec spec);

  double next();
  /// Repositions the stream at sample index.
  void seek(std::uint64_t index);
  std::uint64_t position() const { return index_; }

  /// Uniform on (0, 1], 53-bit resolution, from two 32-bit words.
  static double to_unit_interval(std::uint32_t hi, std::uint32_t lo);

 private:
  void refill();

  RngSpec spec_;
  std::uint64_t index_ = 0;
  std::uint64_t block_ = ~std::uint64_t{0};
  std::array<double, 2> cache_{};
};

}  // namespace homest
