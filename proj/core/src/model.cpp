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

#include "xstory/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "xstory/error.hpp"

namespace xstory {

using json = nlohmann::json;

namespace {

[[noreturn]] void node_error(int node_id, const std::string& what) {
  throw InputError("node " + std::to_string(node_id) + ": " + what);
}

}  // namespace

DecisionTree DecisionTree::from_nodes(std::vector<TreeNode> nodes, std::size_t num_features) {
  if (nodes.empty()) throw InputError("has no nodes");

  std::unordered_map<int, int> index_of;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!index_of.emplace(nodes[i].node_id, static_cast<int>(i)).second) {
      node_error(nodes[i].node_id, "duplicate node id");
    }
  }

  std::vector<int> parent_count(nodes.size(), 0);
  DecisionTree tree;
  tree.flat_.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& node = nodes[i];
    FlatNode& flat = tree.flat_[i];
    if (node.kind == NodeKind::kLeaf) {
      if (!std::isfinite(node.leaf_value) || node.leaf_value < 0.0 || node.leaf_value > 1.0) {
        node_error(node.node_id, "leaf_value outside [0, 1]");
      }
      flat = {-1, 0.0, -1, -1, node.leaf_value};
      continue;
    }
    if (node.split_feature < 0 || static_cast<std::size_t>(node.split_feature) >= num_features) {
      node_error(node.node_id,
                 "split_feature " + std::to_string(node.split_feature) + " out of range");
    }
    if (!std::isfinite(node.threshold)) {
      node_error(node.node_id, "threshold is not finite");
    }
    auto left = index_of.find(node.left_id);
    auto right = index_of.find(node.right_id);
    if (left == index_of.end()) {
      node_error(node.node_id,
                 "dangling child: left_id " + std::to_string(node.left_id) + " does not exist");
    }
    if (right == index_of.end()) {
      node_error(node.node_id,
                 "dangling child: right_id " + std::to_string(node.right_id) + " does not exist");
    }
    if (left->second == right->second) {
      node_error(node.node_id, "left and right child are the same node");
    }
    ++parent_count[left->second];
    ++parent_count[right->second];
    flat = {node.split_feature, node.threshold, left->second, right->second, 0.0};
  }

  int root = -1;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (parent_count[i] > 1) node_error(nodes[i].node_id, "node has several parents");
    if (parent_count[i] == 0) {
      if (root != -1) node_error(nodes[i].node_id, "second root (node has no parent)");
      root = static_cast<int>(i);
    }
  }
  if (root == -1) node_error(nodes.front().node_id, "no root: the node graph has a cycle");

  // Single parent everywhere plus one root: any node unreachable from the
  // root must sit on a cycle.
  std::vector<bool> seen(nodes.size(), false);
  std::vector<int> stack{root};
  std::size_t visited = 0;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    if (seen[i]) continue;
    seen[i] = true;
    ++visited;
    if (tree.flat_[i].feature >= 0) {
      stack.push_back(tree.flat_[i].left);
      stack.push_back(tree.flat_[i].right);
    }
  }
  if (visited != nodes.size()) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!seen[i]) node_error(nodes[i].node_id, "node is on a cycle");
    }
  }

  tree.nodes_ = std::move(nodes);
  tree.root_ = root;
  return tree;
}

int DecisionTree::leaf_index(std::span<const double> features) const {
  int i = root_;
  while (flat_[i].feature >= 0) {
    const FlatNode& n = flat_[i];
    i = features[n.feature] <= n.threshold ? n.left : n.right;
  }
  return i;
}

double DecisionTree::route(std::span<const double> features) const {
  return flat_[leaf_index(features)].value;
}

TreeEnsemble::TreeEnsemble(std::vector<std::string> feature_names, ClassLabels labels,
                           std::vector<DecisionTree> trees)
    : feature_names_(std::move(feature_names)), labels_(std::move(labels)), trees_(std::move(trees)) {
  if (trees_.empty()) throw InputError("ensemble has no trees");
  for (std::size_t i = 0; i < feature_names_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (feature_names_[i] == feature_names_[j]) {
        throw InputError("duplicate feature name '" + feature_names_[i] + "'");
      }
    }
  }
}

int TreeEnsemble::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < feature_names_.size(); ++i) {
    if (feature_names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

double TreeEnsemble::predict(std::span<const double> features) const {
  double sum = 0.0;
  for (const DecisionTree& tree : trees_) sum += tree.route(features);
  return sum / static_cast<double>(trees_.size());
}

namespace {

template <typename T>
T required(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) throw InputError(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw InputError(where + ": field '" + key + "' has the wrong type");
  }
}

TreeNode parse_node(const json& j, std::size_t tree_index, std::size_t position) {
  std::ostringstream where_stream;
  where_stream << "tree " << tree_index << ", node #" << position;
  std::string where = where_stream.str();
  if (!j.is_object()) throw InputError(where + ": node must be an object");

  TreeNode node;
  node.node_id = required<int>(j, "node_id", where);
  where = "tree " + std::to_string(tree_index) + ", node " + std::to_string(node.node_id);
  const auto kind = required<std::string>(j, "kind", where);
  if (kind == "leaf") {
    node.kind = NodeKind::kLeaf;
    node.leaf_value = required<double>(j, "leaf_value", where);
  } else if (kind == "internal") {
    node.kind = NodeKind::kInternal;
    node.split_feature = required<int>(j, "split_feature", where);
    node.threshold = required<double>(j, "threshold", where);
    node.left_id = required<int>(j, "left_id", where);
    node.right_id = required<int>(j, "right_id", where);
  } else {
    throw InputError(where + ": unknown kind '" + kind + "'");
  }
  return node;
}

}  // namespace

TreeEnsemble load_ensemble(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("model document must be a JSON object");

  const auto names = required<std::vector<std::string>>(doc, "feature_names", "model");
  const auto labels = required<std::vector<std::string>>(doc, "class_labels", "model");
  if (labels.size() != 2) throw InputError("model: class_labels must hold exactly two labels");
  if (labels[0] == labels[1]) throw InputError("model: class_labels must differ");

  auto trees_it = doc.find("trees");
  if (trees_it == doc.end() || !trees_it->is_array()) {
    throw InputError("model: missing array field 'trees'");
  }
  std::vector<DecisionTree> trees;
  trees.reserve(trees_it->size());
  for (std::size_t t = 0; t < trees_it->size(); ++t) {
    const json& tree_doc = (*trees_it)[t];
    if (!tree_doc.is_array()) {
      throw InputError("tree " + std::to_string(t) + ": must be an array of nodes");
    }
    std::vector<TreeNode> nodes;
    nodes.reserve(tree_doc.size());
    for (std::size_t i = 0; i < tree_doc.size(); ++i) nodes.push_back(parse_node(tree_doc[i], t, i));
    try {
      trees.push_back(DecisionTree::from_nodes(std::move(nodes), names.size()));
    } catch (const InputError& e) {
      throw InputError("tree " + std::to_string(t) + ", " + e.what());
    }
  }
  return TreeEnsemble(names, ClassLabels{labels[0], labels[1]}, std::move(trees));
}

TreeEnsemble load_ensemble_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open model file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return load_ensemble(buffer.str());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string serialize_ensemble(const TreeEnsemble& ensemble) {
  json doc;
  doc["feature_names"] = ensemble.feature_names();
  doc["class_labels"] = {ensemble.class_labels().negative, ensemble.class_labels().positive};
  json trees = json::array();
  for (const DecisionTree& tree : ensemble.trees()) {
    json nodes = json::array();
    for (const TreeNode& n : tree.nodes()) {
      if (n.kind == NodeKind::kLeaf) {
        nodes.push_back({{"node_id", n.node_id}, {"kind", "leaf"}, {"leaf_value", n.leaf_value}});
      } else {
        nodes.push_back({{"node_id", n.node_id},
                         {"kind", "internal"},
                         {"split_feature", n.split_feature},
                         {"threshold", n.threshold},
                         {"left_id", n.left_id},
                         {"right_id", n.right_id}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  doc["trees"] = std::move(trees);
  return doc.dump();
}

std::string predict_label(double score, double threshold, const ClassLabels& labels) {
  return score >= threshold ? labels.positive : labels.negative;
}

PredictionRecord make_prediction_record(double score, double threshold, const ClassLabels& labels,
                                        std::optional<std::string> actual_label) {
  PredictionRecord record;
  record.score = score;
  record.threshold = threshold;
  record.predicted_label = predict_label(score, threshold, labels);
  if (actual_label) {
    record.correct = (*actual_label == record.predicted_label);
    record.actual_label = std::move(actual_label);
  }
  return record;
}

}  // namespace xstory
