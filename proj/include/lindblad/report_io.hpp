#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lindblad/complex_matrix.hpp"

// Deterministic text output: fixed-precision numbers, fixed column order,
// newline-terminated files, so identical runs produce identical bytes.

namespace lindblad {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

inline std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header) {
    append_row(header);
  }

  void add_row(const std::vector<std::string>& cells) { append_row(cells); }

  const std::string& text() const { return text_; }

 private:
  void append_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }
  std::string text_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open for writing: " + path);
  out << content;
  if (!out) throw NumericFailureError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open for reading: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

}  // namespace lindblad
