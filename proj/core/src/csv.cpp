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

#include "xstory/csv.hpp"

#include <fstream>
#include <sstream>

#include "xstory/error.hpp"

namespace xstory::csv {

int Table::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::string location(std::string_view source, std::size_t line) {
  std::ostringstream out;
  out << source << ":" << line;
  return out.str();
}

}  // namespace

Table read(std::istream& in, std::string_view source_name) {
  Table table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes "" from an absent trailing field
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool have_header = false;

  auto finish_record = [&]() {
    // A physically blank line is skipped rather than read as one empty field.
    if (record.empty() && field.empty() && !field_started) return;
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
    if (!have_header) {
      table.header = std::move(record);
      have_header = true;
    } else {
      if (record.size() != table.header.size()) {
        std::ostringstream msg;
        msg << location(source_name, record_line) << ": expected " << table.header.size()
            << " fields, found " << record.size();
        throw InputError(msg.str());
      }
      table.rows.push_back(std::move(record));
      table.line_numbers.push_back(record_line);
    }
    record.clear();
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw InputError(location(source_name, line) + ": stray quote inside unquoted field");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        finish_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw InputError(location(source_name, record_line) + ": unterminated quoted field");
  }
  if (field_started || !field.empty() || !record.empty()) finish_record();
  if (!have_header) throw InputError(std::string(source_name) + ": missing header row");
  return table;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  return read(in, path);
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace xstory::csv
