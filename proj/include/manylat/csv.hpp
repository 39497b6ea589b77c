#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "manylat/errors.hpp"

namespace manylat {

// 17 significant digits round-trip exactly, so replay comparisons are
// bit-exact on the decimal form.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Row-oriented CSV writer; every cell is already a string.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw ConfigError("cannot open output file " + path);
    write_row(header);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(unsigned long long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const std::string& v) { return v; }

 private:
  std::ofstream out_;
};

}  // namespace manylat
