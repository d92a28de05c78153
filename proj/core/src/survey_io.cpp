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

#include "xstory/survey_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "xstory/csv.hpp"
#include "xstory/error.hpp"

namespace xstory::eval {

using json = nlohmann::json;

std::vector<ResponseRecord> parse_records(std::string_view text, std::string_view source_name) {
  std::istringstream in{std::string(text)};
  const std::string src(source_name);
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
  const csv::Table table = csv::read(in, source_name);
  const int case_col = table.column_index("case_id");
  const int choice_col = table.column_index("choice");
  const int narrative_col = table.column_index("narrative");
  const int elapsed_col = table.column_index("elapsed_s");
  const int sample_col = table.column_index("sample");
  if (case_col < 0 || choice_col < 0 || narrative_col < 0) {
    throw InputError(src + ":1: header must contain case_id, choice and narrative");
  }

  std::vector<ResponseRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    const std::string where = src + ":" + std::to_string(line);
    ResponseRecord record;
    record.line = line;
    record.case_id = row[case_col];
    if (record.case_id.empty()) throw InputError(where + ": empty case_id");
    const auto choice = parse_choice(row[choice_col]);
    if (!choice) {
      throw InputError(where + ": choice '" + row[choice_col] + "' is not one of own, similar, llm");
    }
    record.choice = *choice;
    record.narrative_text = row[narrative_col];
    if (elapsed_col >= 0 && !row[elapsed_col].empty()) {
      try {
        std::size_t used = 0;
        record.elapsed_s = std::stod(row[elapsed_col], &used);
        if (used != row[elapsed_col].size()) throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw InputError(where + ": elapsed_s '" + row[elapsed_col] + "' is not a number");
      }
    }
    if (sample_col >= 0) record.sample = row[sample_col];
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<ResponseRecord> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open records file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_records(buffer.str(), path);
}

std::vector<KeywordSet> parse_keyword_sets(std::string_view document, std::string_view source_name) {
  const std::string src(source_name);
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InputError(src + ": not valid JSON: " + e.what());
  }
  if (!doc.is_array()) throw InputError(src + ": keyword sets must be a JSON array");
  std::vector<KeywordSet> sets;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = src + ": entry " + std::to_string(i);
    KeywordSet set;
    try {
      set.case_id = doc[i].at("case_id").get<std::string>();
      set.true_cf_label = doc[i].at("true_cf_label").get<std::string>();
      for (const json& k : doc[i].at("accepted_keywords")) {
        std::string keyword = k.get<std::string>();
        for (char& c : keyword) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        set.accepted_keywords.push_back(std::move(keyword));
      }
    } catch (const json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
    try {
      validate(set);
    } catch (const std::invalid_argument& e) {
      throw InputError(where + ": " + e.what());
    }
    for (const KeywordSet& existing : sets) {
      if (existing.case_id == set.case_id) throw InputError(where + ": duplicate case_id '" + set.case_id + "'");
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

std::vector<KeywordSet> read_keyword_sets(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open keyword file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_keyword_sets(buffer.str(), path);
}

}  // namespace xstory::eval
