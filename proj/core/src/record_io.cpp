#include "homest/record_io.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "homest/error.hpp"

namespace homest {

namespace {

constexpr char kMagic[8] = {'H', 'O', 'M', 'R', 'E', 'C', '0', '1'};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits = std::bit_cast<std::uint64_t>(value);
  unsigned char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw IoFailure("binary record: truncated");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return std::bit_cast<T>(bits);
}

double parse_double(const std::string& text, const char* field) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw IoFailure(std::string("CSV record: bad value for ") + field + ": '" + text + "'");
  }
}

std::uint64_t parse_u64(const std::string& text, int base, const char* field) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos, base);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw IoFailure(std::string("CSV record: bad value for ") + field + ": '" + text + "'");
  }
}

}  // namespace

void write_record_csv(std::ostream& out, const MeasurementRecord& record) {
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016" PRIx64, record.model_fingerprint);
  out << "# schema=1\n";
  out << "# dt=" << format_double(record.dt) << ",n_steps=" << record.n_steps() << ",seed=" << record.seed
      << ",stream=" << record.stream << ",theta_true=" << format_double(record.theta_true) << ",fingerprint=" << fp
      << "\n";
  out << "step_index,dy\n";
  for (std::size_t i = 0; i < record.dy.size(); ++i) out << i << ',' << format_double(record.dy[i]) << '\n';
  if (!out) throw IoFailure("CSV record: write failed");
}

MeasurementRecord read_record_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# schema=1") throw IoFailure("CSV record: missing '# schema=1' line");
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw IoFailure("CSV record: missing metadata line");

  MeasurementRecord record;
  std::size_t n_steps = 0;
  int seen = 0;
  std::stringstream meta(line.substr(2));
  std::string item;
  while (std::getline(meta, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw IoFailure("CSV record: malformed metadata '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "dt") {
      record.dt = parse_double(value, "dt");
    } else if (key == "n_steps") {
      n_steps = parse_u64(value, 10, "n_steps");
    } else if (key == "seed") {
      record.seed = parse_u64(value, 10, "seed");
    } else if (key == "stream") {
      record.stream = parse_u64(value, 10, "stream");
    } else if (key == "theta_true") {
      record.theta_true = parse_double(value, "theta_true");
    } else if (key == "fingerprint") {
      record.model_fingerprint = parse_u64(value, 16, "fingerprint");
    } else {
      throw IoFailure("CSV record: unknown metadata key '" + key + "'");
    }
    ++seen;
  }
  if (seen != 6) throw IoFailure("CSV record: incomplete metadata");
  if (!std::getline(in, line) || line != "step_index,dy") throw IoFailure("CSV record: missing column header");

  record.dy.reserve(n_steps);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoFailure("CSV record: malformed row '" + line + "'");
    if (parse_u64(line.substr(0, comma), 10, "step_index") != record.dy.size()) {
      throw IoFailure("CSV record: step indices out of order");
    }
    record.dy.push_back(parse_double(line.substr(comma + 1), "dy"));
  }
  if (record.dy.size() != n_steps) throw IoFailure("CSV record: row count does not match n_steps");
  return record;
}

void write_record_binary(std::ostream& out, const MeasurementRecord& record) {
  out.write(kMagic, sizeof kMagic);
  put_le(out, record.dt);
  put_le(out, static_cast<std::uint64_t>(record.n_steps()));
  put_le(out, record.seed);
  put_le(out, record.stream);
  put_le(out, record.theta_true);
  put_le(out, record.model_fingerprint);
  for (double v : record.dy) put_le(out, v);
  if (!out) throw IoFailure("binary record: write failed");
}

MeasurementRecord read_record_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw IoFailure("binary record: bad magic");
  MeasurementRecord record;
  record.dt = get_le<double>(in);
  const auto n_steps = get_le<std::uint64_t>(in);
  record.seed = get_le<std::uint64_t>(in);
  record.stream = get_le<std::uint64_t>(in);
  record.theta_true = get_le<double>(in);
  record.model_fingerprint = get_le<std::uint64_t>(in);
  record.dy.resize(n_steps);
  for (auto& v : record.dy) v = get_le<double>(in);
  return record;
}

void save_record(const std::filesystem::path& path, const MeasurementRecord& record) {
  const bool binary = path.extension() == ".bin";
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  if (binary) {
    write_record_binary(out, record);
  } else {
    write_record_csv(out, record);
  }
}

MeasurementRecord load_record(const std::filesystem::path& path) {
  const bool binary = path.extension() == ".bin";
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoFailure("cannot open " + path.string());
  return binary ? read_record_binary(in) : read_record_csv(in);
}

}  // namespace homest
