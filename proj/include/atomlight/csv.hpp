#pragma once

// Fixed-dialect CSV emission for the dataset commands: header row, '.'
// decimal separator, every numeric cell rendered as %.12e so goldens diff
// cleanly across platforms.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <atomlight/constants.hpp>

namespace atomlight {

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns)
      : columns_(std::move(columns)) {
    if (columns_.empty()) throw ConfigError("csv: need at least one column");
    for (const auto& c : columns_)
      if (c.empty() || c.find(',') != std::string::npos ||
          c.find('\n') != std::string::npos)
        throw ConfigError("csv: column names must be non-empty and "
                          "comma/newline free");
  }

  void add_row(const std::vector<double>& row) {
    if (row.size() != columns_.size())
      throw ConfigError("csv: row width does not match the header");
    rows_.push_back(row);
  }

  std::size_t row_count() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }

  std::string to_string() const {
    std::string out;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      if (j) out += ',';
      out += columns_[j];
    }
    out += '\n';
    for (const auto& row : rows_) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) out += ',';
        out += csv_number(row[j]);
      }
      out += '\n';
    }
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("csv: cannot open for writing: " + path);
    const std::string body = to_string();
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw ConfigError("csv: write failed: " + path);
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open file: " + path);
  std::string s((std::istreambuf_iterator<char>(f)),
                std::istreambuf_iterator<char>());
  return s;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw ConfigError("write failed: " + path);
}

}  // namespace atomlight
