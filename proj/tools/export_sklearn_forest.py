# Copyright 2026 The xstory Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Export a fitted scikit-learn RandomForestClassifier to the xstory model JSON.

Leaf values are the positive-class fraction of each leaf, so the mean over
trees reproduces predict_proba(X)[:, 1].
"""

import json


def export_tree(estimator):
    tree = estimator.tree_
    nodes = []
    for node_id in range(tree.node_count):
        left = int(tree.children_left[node_id])
        right = int(tree.children_right[node_id])
        if left == -1:
            counts = tree.value[node_id][0]
            total = float(counts.sum())
            nodes.append({
                "node_id": node_id,
                "kind": "leaf",
                "leaf_value": float(counts[1]) / total if total > 0 else 0.0,
            })
        else:
            nodes.append({
                "node_id": node_id,
                "kind": "internal",
                "split_feature": int(tree.feature[node_id]),
                "threshold": float(tree.threshold[node_id]),
                "left_id": left,
                "right_id": right,
            })
    return nodes


def export_forest(forest, feature_names, class_labels):
    if len(forest.classes_) != 2:
        raise ValueError("only binary classifiers are supported")
    return {
        "feature_names": list(feature_names),
        "class_labels": list(class_labels),
        "trees": [export_tree(est) for est in forest.estimators_],
    }


def write_forest(path, forest, feature_names, class_labels):
    with open(path, "w", encoding="utf-8") as out:
        json.dump(export_forest(forest, feature_names, class_labels), out, separators=(",", ":"))
        out.write("\n")
