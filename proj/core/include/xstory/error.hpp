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

#include <stdexcept>
#include <string>

namespace xstory {

// Raised for malformed documents, schema mismatches and other bad inputs.
// The message always carries enough context (file, row, node id) to locate
// the problem.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required input column/feature was absent or an unexpected one was present.
class SchemaMismatchError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace xstory
