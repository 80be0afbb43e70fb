#pragma once

#include <filesystem>
#include <iosfwd>

#include "homest/trajectory.hpp"

namespace homest {

/// CSV record layout:
///   # schema=1
///   # dt=<%.17g>,n_steps=<n>,seed=<u64>,stream=<u64>,theta_true=<%.17g>,fingerprint=<hex u64>
///   step_index,dy
///   0,<dy_0>
///   ...
/// Values are printed with 17 significant digits and so round-trip exactly.
void write_record_csv(std::ostream& out, const MeasurementRecord& record);
MeasurementRecord read_record_csv(std::istream& in);

/// Binary record layout, all fields little-endian:
///   offset 0   8 bytes  magic "HOMREC01"
///   offset 8   f64      dt
///   offset 16  u64      n_steps
///   offset 24  u64      seed
///   offset 32  u64      stream
///   offset 40  f64      theta_true
///   offset 48  u64      model fingerprint
///   offset 56  f64[n]   dy
void write_record_binary(std::ostream& out, const MeasurementRecord& record);
MeasurementRecord read_record_binary(std::istream& in);

/// Dispatches on the extension: ".csv" or ".bin". Throws IoFailure.
void save_record(const std::filesystem::path& path, const MeasurementRecord& record);
MeasurementRecord load_record(const std::filesystem::path& path);

}  // namespace homest
