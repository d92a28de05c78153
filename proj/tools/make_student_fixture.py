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

"""Generate the synthetic student-performance fixture under data/student/.

The public student dataset is not bundled, so this draws a look-alike table
(same feature names and value ranges), trains a random forest with the
hyperparameters used for that dataset and exports it. The explained instance
"example" mirrors the running example: two past failures, 22 absences, poor
health, a mother with higher education and no family support.

Usage: python3 tools/make_student_fixture.py [out_dir]
"""

import csv
import os
import sys

import numpy as np
from sklearn.ensemble import RandomForestClassifier

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from export_sklearn_forest import write_forest  # noqa: E402

FEATURES = [
    "sex", "age", "address", "famsize", "Medu", "Fedu", "traveltime", "studytime",
    "failures", "schoolsup", "famsup", "paid", "activities", "higher", "internet",
    "romantic", "famrel", "freetime", "goout", "Dalc", "Walc", "health", "absences",
]
BINARY_TEXT = {
    "sex": ("F", "M"),
    "address": ("R", "U"),
    "famsize": ("GT3", "LE3"),
}
YES_NO = {"schoolsup", "famsup", "paid", "activities", "higher", "internet", "romantic"}
LABELS = ("fail", "pass")
ROWS = 395
TRAIN_ROWS = 296
EXAMPLE = {
    "sex": 1, "age": 17, "address": 1, "famsize": 0, "Medu": 4, "Fedu": 3,
    "traveltime": 1, "studytime": 2, "failures": 2, "schoolsup": 0, "famsup": 0,
    "paid": 1, "activities": 1, "higher": 1, "internet": 1, "romantic": 1,
    "famrel": 4, "freetime": 3, "goout": 4, "Dalc": 2, "Walc": 3, "health": 1,
    "absences": 22,
}


def draw(rng, n):
    cols = {
        "sex": rng.integers(0, 2, n),
        "age": rng.integers(15, 23, n),
        "address": (rng.random(n) < 0.78).astype(int),
        "famsize": (rng.random(n) < 0.29).astype(int),
        "Medu": rng.integers(0, 5, n),
        "Fedu": rng.integers(0, 5, n),
        "traveltime": rng.choice([1, 2, 3, 4], n, p=[0.65, 0.27, 0.06, 0.02]),
        "studytime": rng.choice([1, 2, 3, 4], n, p=[0.27, 0.5, 0.16, 0.07]),
        "failures": rng.choice([0, 1, 2, 3], n, p=[0.79, 0.13, 0.04, 0.04]),
        "schoolsup": (rng.random(n) < 0.13).astype(int),
        "famsup": (rng.random(n) < 0.61).astype(int),
        "paid": (rng.random(n) < 0.46).astype(int),
        "activities": (rng.random(n) < 0.51).astype(int),
        "higher": (rng.random(n) < 0.95).astype(int),
        "internet": (rng.random(n) < 0.83).astype(int),
        "romantic": (rng.random(n) < 0.33).astype(int),
        "famrel": rng.integers(1, 6, n),
        "freetime": rng.integers(1, 6, n),
        "goout": rng.integers(1, 6, n),
        "Dalc": rng.choice([1, 2, 3, 4, 5], n, p=[0.7, 0.19, 0.07, 0.02, 0.02]),
        "Walc": rng.integers(1, 6, n),
        "health": rng.integers(1, 6, n),
        "absences": np.minimum(rng.geometric(0.18, n) - 1, 75),
    }
    return np.column_stack([cols[f] for f in FEATURES]).astype(float)


def pass_logit(X):
    c = {f: X[:, i] for i, f in enumerate(FEATURES)}
    return (0.9 - 1.3 * c["failures"] + 0.35 * (c["Medu"] - 2) + 0.3 * (c["studytime"] - 2)
            - 0.12 * np.minimum(c["absences"] - 4, 20) - 0.3 * (c["goout"] - 3) - 0.25 * (c["Dalc"] - 1)
            + 0.8 * (c["higher"] - 1) - 0.3 * c["romantic"] + 0.2 * c["famsup"]
            + 0.15 * (c["health"] - 3) - 0.2 * (c["traveltime"] - 1) + 0.25 * c["paid"])


def build(seed):
    rng = np.random.default_rng(seed)
    X = draw(rng, ROWS)
    example_row = TRAIN_ROWS + 10
    X[example_row] = [EXAMPLE[f] for f in FEATURES]
    p = 1.0 / (1.0 + np.exp(-pass_logit(X)))
    y = (rng.random(ROWS) < p).astype(int)
    y[example_row] = 0
    forest = RandomForestClassifier(
        n_estimators=400, bootstrap=True, max_features="sqrt", min_samples_leaf=4,
        min_samples_split=10, max_depth=70, random_state=seed)
    forest.fit(X[:TRAIN_ROWS], y[:TRAIN_ROWS])
    return X, y, forest, example_row


def display(feature, value):
    v = int(value)
    if feature in BINARY_TEXT:
        return BINARY_TEXT[feature][v]
    if feature in YES_NO:
        return "yes" if v else "no"
    return ""


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join("data", "student")
    os.makedirs(out_dir, exist_ok=True)
    # Pick the first seed whose explained instance lands near 44%
    # and is correctly classified as a fail.
    for seed in range(200):
        X, y, forest, example_row = build(seed)
        score = forest.predict_proba(X[example_row:example_row + 1])[0, 1]
        if 0.43 <= score < 0.455:
            break
    else:
        raise SystemExit("no seed produced a borderline example")

    ids = ["s%03d" % i for i in range(ROWS)]
    ids[example_row] = "example"
    write_forest(os.path.join(out_dir, "model.json"), forest, FEATURES, LABELS)

    with open(os.path.join(out_dir, "students.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id"] + FEATURES + ["label"])
        for i in range(ROWS):
            w.writerow([ids[i]] + [int(v) for v in X[i]] + [LABELS[y[i]]])
    with open(os.path.join(out_dir, "students_display.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(FEATURES)
        for i in range(ROWS):
            w.writerow([display(feat, X[i, j]) for j, feat in enumerate(FEATURES)])
    with open(os.path.join(out_dir, "train_rows.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(FEATURES)
        for i in range(TRAIN_ROWS):
            w.writerow([int(v) for v in X[i]])
    proba = forest.predict_proba(X)[:, 1]
    with open(os.path.join(out_dir, "expected_predictions.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "score"])
        for i in range(ROWS):
            w.writerow([ids[i], repr(float(proba[i]))])
    print("seed %d, example row %d, score %.6f" % (seed, example_row, score))


if __name__ == "__main__":
    main()
