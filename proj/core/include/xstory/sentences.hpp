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

#include <cstddef>
#include <string>
#include <string_view>

namespace xstory::narrative {

// Counts sentences. A sentence ends at '.', '!' or '?' that is followed (after
// any closing quotes or brackets) by whitespace or the end of the text; a
// period between two digits never ends one. Trailing text without a
// terminator counts as one more sentence. Empty or blank text has none.
std::size_t count_sentences(std::string_view text);

struct LimitCheck {
  bool compliant = true;
  bool empty = false;
  std::size_t sentence_count = 0;
  std::string warning;  // empty when compliant and non-empty
};

LimitCheck enforce_limit(std::string_view text, std::size_t limit);

}  // namespace xstory::narrative
