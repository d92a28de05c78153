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

#include "xstory/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "xstory/csv.hpp"
#include "xstory/error.hpp"

namespace xstory::shap {

const ShapRow* ShapTable::find(const std::string& feature) const {
  for (const ShapRow& row : rows) {
    if (row.feature_name == feature) return &row;
  }
  return nullptr;
}

ShapTable make_table(const std::vector<std::string>& feature_names, const TabularInstance& instance,
                     const Attribution& attribution) {
  ShapTable table;
  table.base_value = attribution.base_value;
  table.score = attribution.score;
  table.rows.reserve(feature_names.size());
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    table.rows.push_back({feature_names[i], instance.display(feature_names[i]), attribution.phi[i]});
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const ShapRow& a, const ShapRow& b) {
    if (a.shap_value != b.shap_value) return a.shap_value > b.shap_value;
    return a.feature_name < b.feature_name;
  });
  return table;
}

namespace {

// 1 / (d * C(d-1, s)) == s! (d-s-1)! / d!
std::vector<double> coalition_weights(std::size_t d) {
  std::vector<double> w(d, 0.0);
  for (std::size_t s = 0; s < d; ++s) {
    double binom = 1.0;
    for (std::size_t k = 1; k <= s; ++k) {
      binom = binom * static_cast<double>(d - 1 - s + k) / static_cast<double>(k);
    }
    w[s] = 1.0 / (static_cast<double>(d) * binom);
  }
  return w;
}

}  // namespace

ShapTable exact_shapley(const ScoreFunction& predict, const std::vector<std::string>& feature_names,
                        const TabularInstance& instance, const BackgroundSet& background) {
  const std::size_t d = feature_names.size();
  if (d > kMaxExactFeatures) {
    throw std::invalid_argument("exact_shapley: " + std::to_string(d) + " features exceeds the limit of " +
                                std::to_string(kMaxExactFeatures));
  }
  if (background.instances.empty()) throw std::invalid_argument("exact_shapley: empty background");

  const std::vector<double> x = to_feature_vector(feature_names, instance);
  const auto refs = to_feature_matrix(feature_names, background);
  const std::size_t num_coalitions = std::size_t{1} << d;

  std::vector<double> value(num_coalitions, 0.0);
  std::vector<double> hybrid(d);
  for (std::size_t mask = 0; mask < num_coalitions; ++mask) {
    double sum = 0.0;
    for (const auto& ref : refs) {
      for (std::size_t i = 0; i < d; ++i) hybrid[i] = (mask >> i) & 1U ? x[i] : ref[i];
      sum += predict(hybrid);
    }
    value[mask] = sum / static_cast<double>(refs.size());
  }

  Attribution attribution;
  attribution.phi.assign(d, 0.0);
  attribution.base_value = value.front();
  attribution.score = value.empty() ? 0.0 : value.back();
  if (d > 0) {
    const auto weight = coalition_weights(d);
    for (std::size_t mask = 0; mask < num_coalitions; ++mask) {
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      if (size == d) continue;
      for (std::size_t i = 0; i < d; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        if (mask & bit) continue;
        attribution.phi[i] += weight[size] * (value[mask | bit] - value[mask]);
      }
    }
  }
  return make_table(feature_names, instance, attribution);
}

ShapTable exact_shapley(const TreeEnsemble& ensemble, const TabularInstance& instance,
                        const BackgroundSet& background) {
  return exact_shapley([&ensemble](std::span<const double> v) { return ensemble.predict(v); },
                       ensemble.feature_names(), instance, background);
}

namespace {

int tree_depth(const DecisionTree& tree) {
  int depth = 0;
  std::vector<std::pair<int, int>> stack{{tree.root(), 0}};
  const auto flat = tree.flat();
  while (!stack.empty()) {
    auto [i, level] = stack.back();
    stack.pop_back();
    depth = std::max(depth, level);
    if (flat[i].feature >= 0) {
      stack.emplace_back(flat[i].left, level + 1);
      stack.emplace_back(flat[i].right, level + 1);
    }
  }
  return depth;
}

// Walks one tree for one (instance, reference) pair. A leaf reached with
// features X taken from the instance and R taken from the reference pays out
// iff every feature in X is in the coalition and none of R is; the Shapley
// value of that indicator game is (|X|-1)!|R|!/(|X|+|R|)! for members of X and
// minus |X|!(|R|-1)!/(|X|+|R|)! for members of R.
class PairWalker {
 public:
  PairWalker(std::size_t num_features, int max_depth, std::vector<double>& phi)
      : side_(num_features, Side::kUnset), phi_(phi) {
    const int n = max_depth + 1;
    weight_x_.assign(static_cast<std::size_t>(n * n), 0.0);
    weight_r_.assign(static_cast<std::size_t>(n * n), 0.0);
    stride_ = n;
    for (int a = 0; a < n; ++a) {
      for (int c = 0; c < n; ++c) {
        if (a + c == 0 || a + c >= n) continue;
        if (a > 0) weight_x_[a * n + c] = 1.0 / ((a + c) * binomial(a + c - 1, c));
        if (c > 0) weight_r_[a * n + c] = 1.0 / ((a + c) * binomial(a + c - 1, a));
      }
    }
    from_x_.reserve(n);
    from_r_.reserve(n);
  }

  void walk(const DecisionTree& tree, std::span<const double> x, std::span<const double> r) {
    flat_ = tree.flat();
    x_ = x;
    r_ = r;
    visit(tree.root());
  }

 private:
  enum class Side : unsigned char { kUnset, kInstance, kReference };

  static double binomial(int n, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
  }

  void visit(int i) {
    const DecisionTree::FlatNode& node = flat_[i];
    if (node.feature < 0) {
      pay_leaf(node.value);
      return;
    }
    const auto f = static_cast<std::size_t>(node.feature);
    const int x_child = x_[f] <= node.threshold ? node.left : node.right;
    const int r_child = r_[f] <= node.threshold ? node.left : node.right;
    switch (side_[f]) {
      case Side::kInstance:
        visit(x_child);
        return;
      case Side::kReference:
        visit(r_child);
        return;
      case Side::kUnset:
        break;
    }
    if (x_child == r_child) {
      visit(x_child);
      return;
    }
    side_[f] = Side::kInstance;
    from_x_.push_back(f);
    visit(x_child);
    from_x_.pop_back();

    side_[f] = Side::kReference;
    from_r_.push_back(f);
    visit(r_child);
    from_r_.pop_back();
    side_[f] = Side::kUnset;
  }

  void pay_leaf(double value) {
    const auto a = static_cast<int>(from_x_.size());
    const auto c = static_cast<int>(from_r_.size());
    if (a + c == 0) return;
    const double wx = weight_x_[a * stride_ + c] * value;
    const double wr = weight_r_[a * stride_ + c] * value;
    for (std::size_t f : from_x_) phi_[f] += wx;
    for (std::size_t f : from_r_) phi_[f] -= wr;
  }

  std::vector<Side> side_;
  std::vector<std::size_t> from_x_;
  std::vector<std::size_t> from_r_;
  std::vector<double> weight_x_;
  std::vector<double> weight_r_;
  int stride_ = 0;
  std::vector<double>& phi_;
  std::span<const DecisionTree::FlatNode> flat_;
  std::span<const double> x_;
  std::span<const double> r_;
};

}  // namespace

Attribution tree_shap_values(const TreeEnsemble& ensemble, std::span<const double> instance,
                             std::span<const std::vector<double>> background) {
  const std::size_t d = ensemble.num_features();
  if (instance.size() != d) throw SchemaMismatchError("tree_shap: instance has the wrong width");
  if (background.empty()) throw std::invalid_argument("tree_shap: empty background");
  for (const auto& ref : background) {
    if (ref.size() != d) throw SchemaMismatchError("tree_shap: background row has the wrong width");
  }

  int max_depth = 0;
  for (const DecisionTree& tree : ensemble.trees()) max_depth = std::max(max_depth, tree_depth(tree));
  const int max_players = std::min<int>(max_depth, static_cast<int>(d));

  Attribution out;
  out.phi.assign(d, 0.0);
  PairWalker walker(d, max_players, out.phi);
  double base_sum = 0.0;
  for (const auto& ref : background) {
    for (const DecisionTree& tree : ensemble.trees()) walker.walk(tree, instance, ref);
    base_sum += ensemble.predict(ref);
  }
  const double scale =
      1.0 / (static_cast<double>(ensemble.trees().size()) * static_cast<double>(background.size()));
  for (double& v : out.phi) v *= scale;
  out.base_value = base_sum / static_cast<double>(background.size());
  out.score = ensemble.predict(instance);
  return out;
}

ShapTable tree_shap(const TreeEnsemble& ensemble, const TabularInstance& instance,
                    const BackgroundSet& background) {
  if (background.instances.empty()) throw std::invalid_argument("tree_shap: empty background");
  const auto x = to_feature_vector(ensemble.feature_names(), instance);
  const auto refs = to_feature_matrix(ensemble.feature_names(), background);
  return make_table(ensemble.feature_names(), instance, tree_shap_values(ensemble, x, refs));
}

namespace {

std::string fixed4(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f", v);
  std::string out(buffer);
  if (out == "-0.0000") out = "0.0000";
  return out;
}

}  // namespace

std::string render_table_text(const ShapTable& table) {
  std::string out = "feature | value | shap\n";
  for (const ShapRow& row : table.rows) {
    out += row.feature_name;
    out += " | ";
    out += row.display_value;
    out += " | ";
    out += fixed4(row.shap_value);
    out += '\n';
  }
  return out;
}

std::string to_csv(const ShapTable& table) {
  std::string out = "feature,value,shap,base,score\n";
  const std::string base = format_number(table.base_value);
  const std::string score = format_number(table.score);
  for (const ShapRow& row : table.rows) {
    out += csv::join_row({row.feature_name, row.display_value, format_number(row.shap_value), base, score});
    out += '\n';
  }
  return out;
}

ShapTable from_csv(const std::string& text, const std::string& source_name) {
  std::istringstream in(text);
  const csv::Table parsed = csv::read(in, source_name);
  const std::vector<std::string> expected{"feature", "value", "shap", "base", "score"};
  if (parsed.header != expected) {
    throw InputError(source_name + ": header must be feature,value,shap,base,score");
  }
  auto number = [&](const std::string& s, std::size_t line) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InputError(source_name + ":" + std::to_string(line) + ": '" + s + "' is not a number");
    }
  };
  ShapTable table;
  for (std::size_t r = 0; r < parsed.rows.size(); ++r) {
    const auto& row = parsed.rows[r];
    const std::size_t line = parsed.line_numbers[r];
    table.rows.push_back({row[0], row[1], number(row[2], line)});
    table.base_value = number(row[3], line);
    table.score = number(row[4], line);
  }
  return table;
}

}  // namespace xstory::shap
