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

#ifndef ATRISK_CSV_HPP_
#define ATRISK_CSV_HPP_

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace atrisk {

// Minimal reader for the unquoted, comma-separated tables this project
// exchanges. Fields are trimmed of surrounding blanks; blank lines skipped.
struct CsvRow {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  // Index of a header column, or throws kParse naming the source.
  std::size_t column(std::string_view name, std::string_view source) const;
};

std::vector<std::string> split_csv_line(std::string_view line);

// Throws kEmptyInput when the stream holds no header line.
CsvTable parse_csv(std::istream& in, std::string_view source);

// Throws kNotFound when the file cannot be opened.
CsvTable read_csv_file(const std::filesystem::path& path);

// Header columns must match `expected` exactly (order included).
void require_header(const CsvTable& table,
                    const std::vector<std::string>& expected,
                    std::string_view source);

}  // namespace atrisk

#endif  // ATRISK_CSV_HPP_
