#pragma once

// Minimal CSV output: one '#' provenance line, a column header, then rows of
// shortest round-trip decimals. Non-finite values are written as the tokens
// inf, -inf and nan.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qfilter {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view comment, const std::vector<std::string>& columns)
      : path_(path), n_columns_(columns.size()) {
    if (path.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
    }
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    out_ << "# " << comment << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != n_columns_) throw std::logic_error("CSV row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (const double v : values) cells.push_back(format_value(v));
    row(cells);
  }

  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing " + path_.string());
  }

  ~CsvWriter() {
    if (out_.is_open()) out_.close();
  }

 private:
  std::filesystem::path path_;
  std::size_t n_columns_;
  std::ofstream out_;
};

}  // namespace qfilter
