#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace homest::cli {

/// Column-major numeric table. Integer-valued columns print without a decimal point.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // data[column][row]

  explicit Table(std::vector<std::string> names);
  void add_row(const std::vector<double>& row);
  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
};

/// Output files of one run. Each file is written to a temporary name and renamed into place.
/// Unless commit() is called, the destructor deletes everything written so far, so a failed
/// run leaves no partial outputs behind.
class OutputDir {
 public:
  OutputDir(std::filesystem::path directory, Json config, std::string format);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  /// <stem>.csv (`# schema=1`, `# config=<json>`, header, rows) or <stem>.json.
  void table(const std::string& stem, const Table& t);
  /// <name>.json as {"schema": 1, "config": ..., <fields of body>}.
  void json(const std::string& name, const Json& body);
  /// Verbatim file.
  void text(const std::string& filename, const std::string& content) { write_file(filename, content); }
  void commit() { committed_ = true; }

  const std::filesystem::path& directory() const { return dir_; }
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  void write_file(const std::filesystem::path& name, const std::string& content);

  std::filesystem::path dir_;
  Json config_;
  std::string format_;
  bool created_dir_ = false;
  bool committed_ = false;
  std::vector<std::filesystem::path> written_;
};

/// %.17g, and "nan"/"inf"/"-inf" for non-finite values.
std::string format_number(double v);

}  // namespace homest::cli
