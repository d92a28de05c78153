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

#include "xstory/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "xstory/csv.hpp"
#include "xstory/error.hpp"

namespace xstory {

std::string format_number(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string TabularInstance::display(const std::string& feature) const {
  if (auto it = display_values.find(feature); it != display_values.end() && !it->second.empty()) {
    return it->second;
  }
  if (auto it = values.find(feature); it != values.end()) return format_number(it->second);
  return {};
}

std::vector<double> to_feature_vector(const std::vector<std::string>& feature_names,
                                      const TabularInstance& instance) {
  std::vector<double> out;
  out.reserve(feature_names.size());
  for (const std::string& name : feature_names) {
    auto it = instance.values.find(name);
    if (it == instance.values.end()) {
      throw SchemaMismatchError("instance is missing feature '" + name + "'");
    }
    out.push_back(it->second);
  }
  if (instance.values.size() != feature_names.size()) {
    const std::set<std::string> expected(feature_names.begin(), feature_names.end());
    for (const auto& [name, value] : instance.values) {
      if (!expected.contains(name)) {
        throw SchemaMismatchError("instance has unexpected feature '" + name + "'");
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> to_feature_matrix(const std::vector<std::string>& feature_names,
                                                   const BackgroundSet& background) {
  std::vector<std::vector<double>> rows;
  rows.reserve(background.instances.size());
  for (const TabularInstance& instance : background.instances) {
    rows.push_back(to_feature_vector(feature_names, instance));
  }
  return rows;
}

double predict_score(const TreeEnsemble& ensemble, const TabularInstance& instance) {
  return ensemble.predict(to_feature_vector(ensemble.feature_names(), instance));
}

namespace {

double parse_real(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  while (begin < end && *begin == ' ') ++begin;
  while (end > begin && end[-1] == ' ') --end;
  if (begin == end) throw InputError(where + ": missing value (imputation is not supported)");
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw InputError(where + ": '" + text + "' is not a finite number");
  }
  return value;
}

}  // namespace

Dataset read_dataset(const std::string& path, const std::vector<std::string>* expected_features) {
  const csv::Table table = csv::read_file(path);
  Dataset dataset;
  const int label_col = table.column_index("label");
  const int id_col = table.column_index("id");
  std::vector<int> feature_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (static_cast<int>(c) == label_col || static_cast<int>(c) == id_col) continue;
    dataset.feature_names.push_back(table.header[c]);
    feature_cols.push_back(static_cast<int>(c));
  }
  if (expected_features) {
    const std::set<std::string> have(dataset.feature_names.begin(), dataset.feature_names.end());
    for (const std::string& f : *expected_features) {
      if (!have.contains(f)) throw SchemaMismatchError(path + ": missing feature column '" + f + "'");
    }
    const std::set<std::string> want(expected_features->begin(), expected_features->end());
    for (const std::string& f : dataset.feature_names) {
      if (!want.contains(f)) throw SchemaMismatchError(path + ": unexpected column '" + f + "'");
    }
  }

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where_prefix = path + ":" + std::to_string(table.line_numbers[r]);
    TabularInstance instance;
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const std::string& name = dataset.feature_names[k];
      instance.values[name] = parse_real(row[feature_cols[k]], where_prefix + ": column '" + name + "'");
    }
    dataset.rows.push_back(std::move(instance));
    dataset.labels.push_back(label_col >= 0 ? std::optional<std::string>(row[label_col]) : std::nullopt);
    dataset.ids.push_back(id_col >= 0 ? std::optional<std::string>(row[id_col]) : std::nullopt);
  }
  return dataset;
}

void attach_display_values(Dataset& dataset, const std::string& sidecar_path) {
  const csv::Table table = csv::read_file(sidecar_path);
  if (table.rows.size() != dataset.rows.size()) {
    throw InputError(sidecar_path + ": has " + std::to_string(table.rows.size()) +
                     " rows but the dataset has " + std::to_string(dataset.rows.size()));
  }
  const std::set<std::string> known(dataset.feature_names.begin(), dataset.feature_names.end());
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (name == "id" || name == "label") continue;
    if (!known.contains(name)) {
      throw SchemaMismatchError(sidecar_path + ": unknown feature column '" + name + "'");
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (!table.rows[r][c].empty()) dataset.rows[r].display_values[name] = table.rows[r][c];
    }
  }
}

std::size_t select_row(const Dataset& dataset, const std::string& selector) {
  if (selector.rfind("id:", 0) == 0) {
    const std::string id = selector.substr(3);
    for (std::size_t i = 0; i < dataset.ids.size(); ++i) {
      if (dataset.ids[i] && *dataset.ids[i] == id) return i;
    }
    throw InputError("no row with id '" + id + "'");
  }
  std::size_t index = 0;
  auto [ptr, ec] = std::from_chars(selector.data(), selector.data() + selector.size(), index);
  if (ec != std::errc() || ptr != selector.data() + selector.size()) {
    throw InputError("row selector '" + selector + "' is neither an index nor id:<value>");
  }
  if (index >= dataset.rows.size()) {
    throw InputError("row " + selector + " out of range (dataset has " +
                     std::to_string(dataset.rows.size()) + " rows)");
  }
  return index;
}

BackgroundSet sample_background(const Dataset& dataset, std::size_t cap, std::uint64_t seed) {
  BackgroundSet background;
  const std::size_t n = dataset.rows.size();
  if (n == 0) throw InputError("background dataset is empty");
  if (cap == 0) throw InputError("background cap must be positive");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (n > cap) {
    // Partial Fisher-Yates on raw engine output keeps the draw identical
    // across standard libraries (distributions are implementation-defined).
    std::mt19937_64 engine(seed);
    for (std::size_t i = 0; i < cap; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(engine() % (n - i));
      std::swap(order[i], order[j]);
    }
    order.resize(cap);
    std::sort(order.begin(), order.end());
  }
  background.instances.reserve(order.size());
  for (std::size_t i : order) background.instances.push_back(dataset.rows[i]);
  return background;
}

std::vector<double> background_means(const std::vector<std::string>& feature_names,
                                     const BackgroundSet& background) {
  if (background.instances.empty()) throw InputError("background set is empty");
  std::vector<double> means(feature_names.size(), 0.0);
  for (const TabularInstance& instance : background.instances) {
    const auto row = to_feature_vector(feature_names, instance);
    for (std::size_t i = 0; i < row.size(); ++i) means[i] += row[i];
  }
  for (double& m : means) m /= static_cast<double>(background.instances.size());
  return means;
}

}  // namespace xstory
