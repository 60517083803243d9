// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pricer/mat.hpp"

namespace pricer {

// Shortest text form that round-trips a double exactly.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// Row-oriented CSV builder. Values are either verbatim strings (labels,
// statuses) or doubles printed with full round-trip precision, so a rerun
// with the same seed reproduces the file byte for byte.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header)
      : cols_(header.size()) {
    append_row(header);
  }

  void append_row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_)
      throw std::invalid_argument("CsvWriter: wrong number of cells");
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    line += '\n';
    body_ += line;
  }

  // Convenience: every cell printed as a double.
  void append_numeric_row(const std::vector<double>& vals) {
    std::vector<std::string> cells;
    cells.reserve(vals.size());
    for (double v : vals) cells.push_back(fmt_double(v));
    append_row(cells);
  }

  const std::string& str() const { return body_; }

 private:
  std::size_t cols_;
  std::string body_;
};

// Writes via a temporary file and an atomic rename so partially written
// outputs never appear under the final name.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string matrix_csv(const Mat& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += fmt_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace pricer
