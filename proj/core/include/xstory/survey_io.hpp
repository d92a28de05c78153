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

#include <string>
#include <string_view>
#include <vector>

#include "xstory/eval.hpp"

namespace xstory::eval {

// CSV with header `case_id,choice,narrative,elapsed_s` (optional extra
// `sample` column). Errors carry file and line.
std::vector<ResponseRecord> read_records(const std::string& path);
std::vector<ResponseRecord> parse_records(std::string_view text, std::string_view source_name);

// JSON array of {"case_id", "true_cf_label", "accepted_keywords"}.
std::vector<KeywordSet> parse_keyword_sets(std::string_view document,
                                           std::string_view source_name = "<keywords>");
std::vector<KeywordSet> read_keyword_sets(const std::string& path);

}  // namespace xstory::eval
