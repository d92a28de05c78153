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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xstory/model.hpp"

namespace xstory {

// One tabular row. Categorical features arrive already encoded as reals;
// `display_values` holds the human-readable text used in prompts.
struct TabularInstance {
  std::map<std::string, double> values;
  std::map<std::string, std::string> display_values;

  // Display text for `feature`: the sidecar text when present, otherwise the
  // shortest round-trip rendering of the numeric value.
  [[nodiscard]] std::string display(const std::string& feature) const;
};

// Reference distribution for interventional expectations.
struct BackgroundSet {
  std::vector<TabularInstance> instances;
};

// Values of `instance` in `feature_names` order. Throws SchemaMismatchError on
// a missing or extra feature (missing values are never imputed).
std::vector<double> to_feature_vector(const std::vector<std::string>& feature_names,
                                      const TabularInstance& instance);

std::vector<std::vector<double>> to_feature_matrix(const std::vector<std::string>& feature_names,
                                                   const BackgroundSet& background);

double predict_score(const TreeEnsemble& ensemble, const TabularInstance& instance);

// A CSV dataset whose header is the model's feature names plus optional `label`
// and `id` columns.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<TabularInstance> rows;
  std::vector<std::optional<std::string>> labels;  // parallel to rows
  std::vector<std::optional<std::string>> ids;     // parallel to rows
};

// Reads a dataset CSV. Every feature column must parse as a finite real; the
// error names file and line. When `expected_features` is given the header must
// contain exactly those features (any order).
Dataset read_dataset(const std::string& path,
                     const std::vector<std::string>* expected_features = nullptr);

// Merges a display sidecar CSV (same feature header, rows aligned with the
// dataset) into `dataset`. Empty cells leave the numeric rendering in place.
void attach_display_values(Dataset& dataset, const std::string& sidecar_path);

// Row selector: a 0-based index ("3") or an id ("id:S17").
std::size_t select_row(const Dataset& dataset, const std::string& selector);

// Uniform subsample of at most `cap` rows without replacement, seeded; rows
// keep their dataset order. Returns all rows when the dataset is small enough.
BackgroundSet sample_background(const Dataset& dataset, std::size_t cap, std::uint64_t seed);

// Per-feature arithmetic mean over the background.
std::vector<double> background_means(const std::vector<std::string>& feature_names,
                                     const BackgroundSet& background);

// Shortest text that parses back to `value` ("22", "0.5", "1e-07").
std::string format_number(double value);

}  // namespace xstory
