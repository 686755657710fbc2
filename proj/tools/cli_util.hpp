#pragma once

// Shared CLI helpers: unit-tagged config values, CSV I/O, report emission,
// and the output-directory lock. The CLI talks to the library exclusively
// through the C API in hfcqed.h.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace cli {

using nlohmann::json;

struct CliError : std::runtime_error {
  CliError(std::string status_, std::string message_, std::string field_ = "")
      : std::runtime_error(message_),
        status(std::move(status_)),
        message(std::move(message_)),
        field(std::move(field_)) {}
  std::string status;
  std::string message;
  std::string field;
};

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Unit families. Frequencies normalize to Hz, times to seconds, temperatures
// to kelvin. A value carries its unit either as {"value": x, "unit": "GHz"}
// or as a string "20.92 GHz"; a bare number is a hard error.
inline double unit_factor(const std::string& unit, const std::string& field) {
  const std::string u = lower(unit);
  if (u == "hz") return 1.0;
  if (u == "khz") return 1e3;
  if (u == "mhz") return 1e6;
  if (u == "ghz") return 1e9;
  if (u == "s") return 1.0;
  if (u == "ms") return 1e-3;
  if (u == "us") return 1e-6;
  if (u == "ns") return 1e-9;
  if (u == "k") return 1.0;
  if (u == "mk") return 1e-3;
  throw CliError("invalid_argument", "unknown unit '" + unit + "'", field);
}

inline double tagged_value(const json& node, const std::string& field) {
  if (node.is_object()) {
    if (!node.contains("value") || !node.contains("unit"))
      throw CliError("invalid_argument", "expected {value, unit} object", field);
    return node["value"].get<double>() * unit_factor(node["unit"].get<std::string>(), field);
  }
  if (node.is_string()) {
    const std::string s = node.get<std::string>();
    std::istringstream in(s);
    double v = 0;
    std::string unit;
    if (!(in >> v >> unit))
      throw CliError("invalid_argument", "expected '<number> <unit>' string", field);
    return v * unit_factor(unit, field);
  }
  throw CliError("invalid_argument",
                 "unit tag required (bare numbers are rejected for dimensioned fields)",
                 field);
}

inline const json& require_field(const json& node, const std::string& key,
                                 const std::string& path) {
  if (!node.contains(key))
    throw CliError("invalid_argument", "missing required field", path + "." + key);
  return node[key];
}

inline double tagged_field(const json& node, const std::string& key, const std::string& path) {
  return tagged_value(require_field(node, key, path), path + "." + key);
}

inline double plain_number(const json& node, const std::string& key, const std::string& path) {
  const json& v = require_field(node, key, path);
  if (!v.is_number())
    throw CliError("invalid_argument", "expected a plain number", path + "." + key);
  return v.get<double>();
}

// ---------------- CSV ----------------

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // numeric columns only

  int column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return static_cast<int>(k);
    return -1;
  }
};

inline Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("io", "cannot open CSV file", path);
  Csv csv;
  std::string line;
  if (!std::getline(in, line)) throw CliError("io", "empty CSV file", path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) csv.header.push_back(cell);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        throw CliError("io", "non-numeric CSV cell '" + cell + "'", path);
      }
    }
    if (row.size() != csv.header.size())
      throw CliError("io", "CSV row width does not match header", path);
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw CliError("io", "cannot write CSV file", path);
  for (std::size_t k = 0; k < header.size(); ++k)
    out << header[k] << (k + 1 < header.size() ? "," : "\n");
  out.precision(17);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k)
      out << row[k] << (k + 1 < row.size() ? "," : "\n");
  }
  if (!out) throw CliError("io", "failed writing CSV file", path);
}

// ---------------- output directory lock ----------------

class DirLock {
 public:
  explicit DirLock(const std::filesystem::path& dir) : path_(dir / ".hfcqed.lock") {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f)
      throw CliError("io",
                     "output directory is locked by another run (remove " + path_.string() +
                         " if stale)");
    std::fclose(f);
  }
  ~DirLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  std::filesystem::path path_;
};

inline void write_report(const std::filesystem::path& out_dir, const std::string& subcommand,
                         const json& resolved_config, const json& results) {
  json report;
  report["tool"] = "hfcqed";
  report["subcommand"] = subcommand;
  report["timestamp"] = static_cast<std::int64_t>(std::time(nullptr));
  report["config"] = resolved_config;
  report["results"] = results;
  const auto path = out_dir / (subcommand + "_report.json");
  std::ofstream out(path);
  if (!out) throw CliError("io", "cannot write report", path.string());
  out << report.dump(2) << "\n";
}

}  // namespace cli
