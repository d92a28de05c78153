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

#include "xstory/sentences.hpp"

#include <cctype>

namespace xstory::narrative {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Length of a closing quote/bracket starting at text[i], 0 if none. Covers
// ASCII quotes and brackets plus UTF-8 right single/double quotes.
std::size_t closer_length(std::string_view text, std::size_t i) {
  const char c = text[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  if (text.compare(i, 3, "\xE2\x80\x99") == 0 || text.compare(i, 3, "\xE2\x80\x9D") == 0) return 3;
  return 0;
}

}  // namespace

std::size_t count_sentences(std::string_view text) {
  std::size_t count = 0;
  bool pending = false;  // non-space content since the last sentence end
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (!is_terminator(c)) {
      if (!is_space(static_cast<unsigned char>(c))) pending = true;
      ++i;
      continue;
    }
    pending = true;
    if (c == '.' && i > 0 && i + 1 < text.size() && is_digit(static_cast<unsigned char>(text[i - 1])) &&
        is_digit(static_cast<unsigned char>(text[i + 1]))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && is_terminator(text[j])) ++j;  // "?!", "..."
    while (j < text.size()) {
      const std::size_t n = closer_length(text, j);
      if (n == 0) break;
      j += n;
    }
    if (j == text.size() || is_space(static_cast<unsigned char>(text[j]))) {
      ++count;
      pending = false;
    }
    i = j;
  }
  if (pending) ++count;
  return count;
}

LimitCheck enforce_limit(std::string_view text, std::size_t limit) {
  LimitCheck check;
  check.sentence_count = count_sentences(text);
  check.compliant = check.sentence_count <= limit;
  check.empty = check.sentence_count == 0;
  if (!check.compliant) {
    check.warning = "narrative has " + std::to_string(check.sentence_count) + " sentences, limit is " +
                    std::to_string(limit);
  } else if (check.empty) {
    check.warning = "narrative is empty";
  }
  return check;
}

}  // namespace xstory::narrative
