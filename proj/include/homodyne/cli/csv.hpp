#pragma once

// Run output: "#"-prefixed metadata, a header row, then rows of numbers printed
// with 17 significant digits so that files diff bit-exactly.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "homodyne/errors.hpp"

namespace homodyne::cli {

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct RunOutput {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> warnings;

  void meta(const std::string& key, const std::string& value) { metadata.emplace_back(key, value); }
  void meta(const std::string& key, double value) { metadata.emplace_back(key, format_number(value)); }
  void meta(const std::string& key, bool value) { metadata.emplace_back(key, value ? "true" : "false"); }
  void meta(const std::string& key, const char* value) { metadata.emplace_back(key, value); }

  void add_row(std::vector<double> row) {
    if (row.size() != header.size()) throw DomainError("RunOutput: row width does not match the header");
    for (double x : row) {
      if (!std::isfinite(x)) throw DomainError("RunOutput: non-finite value in output row");
    }
    rows.push_back(std::move(row));
  }
};

inline void write_csv(std::ostream& out, const RunOutput& r) {
  for (const auto& [k, v] : r.metadata) out << "# " << k << ": " << v << '\n';
  for (const auto& w : r.warnings) out << "# warning: " << w << '\n';
  for (std::size_t i = 0; i < r.header.size(); ++i) out << (i ? "," : "") << r.header[i];
  out << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

}  // namespace homodyne::cli
