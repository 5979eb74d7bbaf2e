#pragma once

// Deterministic CSV emission and strict parsing. Doubles are printed with
// %.17g so that write-then-read is lossless and re-runs are byte-identical.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace taseplab {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    columns_ = header.size();
    write_raw(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
      throw std::runtime_error("csv row width mismatch");
    write_raw(cells);
  }

 private:
  void write_raw(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("csv write failure");
  }

  std::ofstream out_;
  std::size_t columns_ = 0;
};

class CsvTable {
 public:
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static CsvTable read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() && in.eof()) break;
      auto cells = split(line);
      if (lineno == 1) {
        t.header = std::move(cells);
      } else {
        if (cells.size() != t.header.size())
          throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                   ": expected " + std::to_string(t.header.size()) +
                                   " columns, got " + std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
      }
    }
    return t;
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("missing column: " + name);
  }

  double number(std::size_t row, std::size_t col) const {
    const std::string& s = rows.at(row).at(col);
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("row " + std::to_string(row + 2) + ": bad number '" + s + "'");
    }
  }

 private:
  static std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    cells.push_back(cur);
    return cells;
  }
};

}  // namespace taseplab
