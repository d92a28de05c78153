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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "xstory/dataset.hpp"
#include "xstory/model.hpp"

namespace xstory::shap {

struct ShapRow {
  std::string feature_name;
  std::string display_value;
  double shap_value = 0.0;
};

// Attributions for one explained prediction. Rows are sorted by shap_value
// descending, ties by feature name ascending, and satisfy
// sum(shap_value) + base_value == score (local accuracy).
struct ShapTable {
  std::vector<ShapRow> rows;
  double base_value = 0.0;
  double score = 0.0;

  // Row for `feature`, or nullptr.
  [[nodiscard]] const ShapRow* find(const std::string& feature) const;
};

// Score of a feature vector laid out in the order given to exact_shapley.
using ScoreFunction = std::function<double(std::span<const double>)>;

inline constexpr std::size_t kMaxExactFeatures = 20;

// Brute-force interventional Shapley values: enumerates every coalition and
// evaluates v(S) = mean over background rows b of predict(x on S, b elsewhere).
// Costs 2^d * |background| calls of `predict`. Throws std::invalid_argument
// when d > kMaxExactFeatures or the background is empty.
ShapTable exact_shapley(const ScoreFunction& predict, const std::vector<std::string>& feature_names,
                        const TabularInstance& instance, const BackgroundSet& background);

// Same as above with the ensemble's own feature order and predict().
ShapTable exact_shapley(const TreeEnsemble& ensemble, const TabularInstance& instance,
                        const BackgroundSet& background);

// Interventional TreeSHAP. For each (tree, background row) pair the tree is
// walked once, tracking which features the explained instance and the
// reference disagree on; each reached leaf contributes the closed-form Shapley
// value of its "all of X present, none of R present" indicator game. Cost is
// O(trees * |background| * nodes) with no coalition enumeration, and the
// result equals exact_shapley up to rounding.
ShapTable tree_shap(const TreeEnsemble& ensemble, const TabularInstance& instance,
                    const BackgroundSet& background);

// Raw attribution vector in feature order (no sorting, no display text).
struct Attribution {
  std::vector<double> phi;
  double base_value = 0.0;
  double score = 0.0;
};
Attribution tree_shap_values(const TreeEnsemble& ensemble, std::span<const double> instance,
                             std::span<const std::vector<double>> background);

// Builds a sorted table from per-feature values.
ShapTable make_table(const std::vector<std::string>& feature_names, const TabularInstance& instance,
                     const Attribution& attribution);

// Prompt-ready text: header line "feature | value | shap" followed by one
// line per row in table order, shap fixed to 4 decimals.
std::string render_table_text(const ShapTable& table);

// CSV export with header `feature,value,shap,base,score`.
std::string to_csv(const ShapTable& table);
// Parses to_csv output back into a table (rows kept in file order).
ShapTable from_csv(const std::string& text, const std::string& source_name = "shap.csv");

}  // namespace xstory::shap
