/*
 * Copyright 2026 The xstory Authors.
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

#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace xstory::csv {

// A parsed CSV document: a header row plus data rows. `line_numbers[i]` is the
// 1-based physical line on which row i starts (quoted fields may span lines).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  // Index of `column` in the header, or -1.
  [[nodiscard]] int column_index(std::string_view column) const;
};

// RFC 4180 reader: comma separated, double-quote escaping, CRLF tolerant.
// Throws InputError on unterminated quotes or ragged rows (with line number).
Table read(std::istream& in, std::string_view source_name = "<csv>");
Table read_file(const std::string& path);

// Quotes `field` when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

}  // namespace xstory::csv
