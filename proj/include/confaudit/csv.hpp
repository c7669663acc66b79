#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "confaudit/error.hpp"
#include "confaudit/util.hpp"

namespace confaudit {

struct DelimitedTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC-4180-style parse: quoted fields may contain the delimiter, doubled
// quotes, and newlines. Accepts \n and \r\n line ends.
inline DelimitedTable read_delimited(const std::string& path,
                                     char delimiter = ',') {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  DelimitedTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool record_started = false;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    if (table.header.empty()) {
      table.header = record;
    } else {
      table.rows.push_back(record);
    }
    record.clear();
    record_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
      record_started = true;
    } else if (c == delimiter) {
      end_field();
      record_started = true;
    } else if (c == '\n') {
      if (record_started || !field.empty() || !record.empty()) end_record();
    } else if (c == '\r') {
      // consumed by the following \n
    } else {
      field.push_back(c);
      record_started = true;
    }
  }
  if (record_started || !field.empty() || !record.empty()) end_record();
  if (in_quotes) throw DataError("unterminated quoted field in " + path);
  if (table.header.empty()) throw DataError("empty file: " + path);

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw DataError(path + ": row " + std::to_string(r + 2) + " has " +
                      std::to_string(table.rows[r].size()) + " fields, header has " +
                      std::to_string(table.header.size()));
    }
  }
  return table;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path, char delimiter = ',')
      : out_(path, std::ios::binary), delimiter_(delimiter) {
    if (!out_) throw DataError("cannot open file for writing: " + path);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << delimiter_;
      out_ << escape(cells[i]);
    }
    out_ << '\n';
  }

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }

 private:
  std::string escape(const std::string& s) const {
    bool needs = s.find(delimiter_) != std::string::npos ||
                 s.find('"') != std::string::npos ||
                 s.find('\n') != std::string::npos;
    if (!needs) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += "\"\"";
      else quoted.push_back(c);
    }
    quoted.push_back('"');
    return quoted;
  }

  std::ofstream out_;
  char delimiter_;
};

}  // namespace confaudit
