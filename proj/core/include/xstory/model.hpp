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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xstory {

enum class NodeKind { kInternal, kLeaf };

// One node of a binary decision tree as it appears in a model document.
// Internal nodes route "value <= threshold" to the left child.
struct TreeNode {
  int node_id = 0;
  NodeKind kind = NodeKind::kLeaf;
  int split_feature = -1;
  double threshold = 0.0;
  int left_id = -1;
  int right_id = -1;
  double leaf_value = 0.0;  // per-tree positive-class probability

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// A validated binary tree. Keeps the document's node order (for lossless
// re-serialization) alongside a compact index-linked copy used for routing.
class DecisionTree {
 public:
  struct FlatNode {
    int feature;  // -1 for leaves
    double threshold;
    int left;  // index into flat(), -1 for leaves
    int right;
    double value;
  };

  // Validates the node list: unique ids, existing children, exactly one root,
  // no node with two parents, every node reachable, finite thresholds,
  // leaf values in [0, 1], split features < num_features. Throws InputError
  // naming the offending node id.
  static DecisionTree from_nodes(std::vector<TreeNode> nodes, std::size_t num_features);

  [[nodiscard]] const std::vector<TreeNode>& nodes() const { return nodes_; }
  [[nodiscard]] std::span<const FlatNode> flat() const { return flat_; }
  [[nodiscard]] int root() const { return root_; }

  // Leaf value reached by `features` (indexed by feature position).
  [[nodiscard]] double route(std::span<const double> features) const;
  // Index into flat() of the leaf reached by `features`.
  [[nodiscard]] int leaf_index(std::span<const double> features) const;

  friend bool operator==(const DecisionTree& a, const DecisionTree& b) {
    return a.nodes_ == b.nodes_;
  }

 private:
  std::vector<TreeNode> nodes_;
  std::vector<FlatNode> flat_;
  int root_ = 0;
};

struct ClassLabels {
  std::string negative;
  std::string positive;

  friend bool operator==(const ClassLabels&, const ClassLabels&) = default;
};

// Binary classifier whose score is the arithmetic mean of the leaf values
// reached in every tree. Immutable after construction.
class TreeEnsemble {
 public:
  TreeEnsemble(std::vector<std::string> feature_names, ClassLabels labels,
               std::vector<DecisionTree> trees);

  [[nodiscard]] const std::vector<std::string>& feature_names() const { return feature_names_; }
  [[nodiscard]] std::size_t num_features() const { return feature_names_.size(); }
  [[nodiscard]] const ClassLabels& class_labels() const { return labels_; }
  [[nodiscard]] const std::vector<DecisionTree>& trees() const { return trees_; }

  // Position of `name` in feature_names(), or -1.
  [[nodiscard]] int feature_index(std::string_view name) const;

  // Mean leaf value over all trees. `features` must have num_features()
  // entries in feature_names() order.
  [[nodiscard]] double predict(std::span<const double> features) const;

  friend bool operator==(const TreeEnsemble&, const TreeEnsemble&) = default;

 private:
  std::vector<std::string> feature_names_;
  ClassLabels labels_;
  std::vector<DecisionTree> trees_;
};

// Parses the JSON model document (`feature_names`, `class_labels`, `trees`,
// each tree a flat node array). Errors are InputError.
TreeEnsemble load_ensemble(std::string_view document);
TreeEnsemble load_ensemble_file(const std::string& path);

// Inverse of load_ensemble: load_ensemble(serialize_ensemble(e)) == e.
std::string serialize_ensemble(const TreeEnsemble& ensemble);

// Positive label iff score >= threshold.
std::string predict_label(double score, double threshold, const ClassLabels& labels);

struct PredictionRecord {
  double score = 0.0;
  double threshold = 0.5;
  std::string predicted_label;
  std::optional<std::string> actual_label;
  std::optional<bool> correct;  // set iff actual_label is
};

PredictionRecord make_prediction_record(double score, double threshold, const ClassLabels& labels,
                                        std::optional<std::string> actual_label = std::nullopt);

}  // namespace xstory
