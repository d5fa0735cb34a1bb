/*
 * Copyright 2026 The atrisk Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "atrisk/csv.hpp"

#include <fstream>
#include <sstream>

#include "atrisk/common.hpp"

namespace atrisk {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name,
                             std::string_view source) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::kParse, std::string(source) + ": missing column '" +
                                     std::string(name) + "'");
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field =
        line.substr(start, comma == std::string_view::npos ? line.npos
                                                           : comma - start);
    fields.emplace_back(trim(field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

CsvTable parse_csv(std::istream& in, std::string_view source) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!have_header) {
      // Tolerate a UTF-8 byte order mark.
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      table.header = split_csv_line(line);
      have_header = true;
      continue;
    }
    table.rows.push_back({line_no, split_csv_line(line)});
  }
  if (!have_header) {
    throw Error(ErrorCode::kEmptyInput, std::string(source) + ": empty file");
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kNotFound, "cannot open '" + path.string() + "'");
  }
  return parse_csv(in, path.string());
}

void require_header(const CsvTable& table,
                    const std::vector<std::string>& expected,
                    std::string_view source) {
  if (table.header != expected) {
    std::ostringstream msg;
    msg << source << ": expected header '";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      msg << (i ? "," : "") << expected[i];
    }
    msg << "'";
    throw Error(ErrorCode::kParse, msg.str());
  }
}

}  // namespace atrisk
