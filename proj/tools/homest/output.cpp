#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "homest/error.hpp"

namespace homest::cli {

namespace fs = std::filesystem;

Table::Table(std::vector<std::string> names) : columns(std::move(names)), data(columns.size()) {}

void Table::add_row(const std::vector<double>& row) {
  if (row.size() != columns.size()) throw std::logic_error("Table::add_row: wrong width");
  for (std::size_t c = 0; c < row.size(); ++c) data[c].push_back(row[c]);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

OutputDir::OutputDir(fs::path directory, Json config, std::string format)
    : dir_(std::move(directory)), config_(std::move(config)), format_(std::move(format)) {
  std::error_code ec;
  if (!fs::exists(dir_, ec)) {
    fs::create_directories(dir_, ec);
    if (ec) throw IoFailure("cannot create output directory " + dir_.string() + ": " + ec.message());
    created_dir_ = true;
  } else if (!fs::is_directory(dir_, ec)) {
    throw IoFailure(dir_.string() + " exists and is not a directory");
  }
}

OutputDir::~OutputDir() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& p : written_) fs::remove(p, ec);
  if (created_dir_) fs::remove(dir_, ec);  // only if still empty
}

void OutputDir::write_file(const fs::path& name, const std::string& content) {
  const fs::path target = dir_ / name;
  const fs::path tmp = dir_ / (name.string() + ".partial");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoFailure("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoFailure("cannot move " + tmp.string() + " into place");
  }
  written_.push_back(target);
}

void OutputDir::table(const std::string& stem, const Table& t) {
  if (format_ == "json") {
    Json columns = Json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      Json col = Json::array();
      for (double v : t.data[c]) {
        if (std::isfinite(v)) col.push_back(v);
        else col.push_back(nullptr);
      }
      columns[t.columns[c]] = std::move(col);
    }
    Json doc;
    doc["schema"] = 1;
    doc["config"] = config_;
    doc["columns"] = std::move(columns);
    write_file(stem + ".json", doc.dump(1) + "\n");
    return;
  }
  std::string s = "# schema=1\n# config=" + config_.dump() + "\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c) s += (c ? "," : "") + t.columns[c];
  s += '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (c) s += ',';
      s += format_number(t.data[c][r]);
    }
    s += '\n';
  }
  write_file(stem + ".csv", s);
}

void OutputDir::json(const std::string& name, const Json& body) {
  Json doc;
  doc["schema"] = 1;
  doc["config"] = config_;
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  write_file(name + ".json", doc.dump(1) + "\n");
}

}  // namespace homest::cli
