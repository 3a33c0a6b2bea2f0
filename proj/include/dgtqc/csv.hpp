// Copyright 2026 the dgtqc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DGTQC_CSV_HPP_
#define DGTQC_CSV_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dgtqc/error.hpp"

namespace dgtqc {

struct CsvRow {
  std::size_t line = 0;  // 1-based line of the row's first character
  std::vector<std::string> fields;
};

// RFC-4180-ish reader: quoted fields, doubled quotes, embedded newlines.
// Lines starting with '#' outside a quoted field are skipped (our own report
// files carry a '#'-prefixed config echo).
inline std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (text[i] == '\n') {  // blank line
      ++line;
      ++i;
      continue;
    }
    if (text[i] == '\r' && i + 1 < n && text[i + 1] == '\n') {
      ++line;
      i += 2;
      continue;
    }
    if (text[i] == '#') {  // comment line
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    CsvRow row;
    row.line = line;
    std::string field;
    bool quoted = false;
    bool row_done = false;
    while (i < n && !row_done) {
      const char c = text[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < n && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            quoted = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
      } else if (c == '"' && field.empty()) {
        quoted = true;
        ++i;
      } else if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
        ++i;
      } else if (c == '\n' || c == '\r') {
        row_done = true;
      } else {
        field.push_back(c);
        ++i;
      }
    }
    if (quoted) {
      throw Error(ErrorKind::kParse,
                  "line " + std::to_string(row.line) + ": unterminated quote in CSV");
    }
    row.fields.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string csv_escape(std::string_view field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  return out;
}

}  // namespace dgtqc

#endif  // DGTQC_CSV_HPP_
