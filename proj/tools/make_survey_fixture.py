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

"""Write the reconstructed survey records under data/survey/.

Only percentages were published, so the per-case counts are the integer
solutions that reproduce them (N = 36, 41, 42, 37, 40, 40). The free-text
narratives are synthetic: a record is written with an accepted keyword
exactly when it is meant to count as accurate. The baseline sample (no
counterfactual shown) is spread evenly over the cases.

Usage: python3 tools/make_survey_fixture.py [out_dir]
"""

import csv
import os
import sys

# case_id, original class, (own, similar, llm), accurate narratives
CASES = [
    ("lighthouse", "missile", (12, 12, 12), 30),
    ("skateboard", "unicycle", (4, 12, 25), 36),
    ("cycle", "rickshaw", (18, 11, 13), 39),
    ("airplanes", "goose", (12, 11, 14), 26),
    ("remote", "blow dryer", (7, 23, 10), 26),
    ("baseball", "soccer ball", (5, 17, 18), 31),
]
KEYWORD = {
    "lighthouse": ["cloud", "clouds"],
    "skateboard": ["person", "man", "boy", "leg"],
    "cycle": ["person", "passenger", "people", "lady"],
    "airplanes": ["sky", "cloud"],
    "remote": ["person", "man", "human"],
    "baseball": ["person", "boy", "man"],
}
ACCURATE = [
    "The {k} makes the picture look like a {c} to the model.",
    "Removing the {k} matters because a {k} near the centre resembles part of a {c}.",
    "I think the {k} in the frame was read as a typical feature of a {c}.",
]
INACCURATE = [
    "The overall shape and colour of the object resemble a {c}.",
    "The angle of the photo makes the main object look like a {c}.",
    "The model probably focused on the outline and texture and saw a {c}.",
]
BASELINE = [(43, 29), (43, 29), (43, 28), (43, 29), (42, 28), (42, 28)]


def case_rows(case_id, cls, counts, accurate, sample):
    choices = ["own"] * counts[0] + ["similar"] * counts[1] + ["llm"] * counts[2]
    n = len(choices)
    rows = []
    for i in range(n):
        # Interleave so accurate narratives are spread over all three choices.
        choice = choices[(i * 7) % n] if n % 7 else choices[i]
        if i < accurate:
            kw = KEYWORD[case_id][i % len(KEYWORD[case_id])]
            text = ACCURATE[i % len(ACCURATE)].format(k=kw, c=cls)
        else:
            text = INACCURATE[i % len(INACCURATE)].format(c=cls)
        elapsed = 30 + (i * 37) % 80
        rows.append([case_id, choice, text, str(elapsed)] + ([sample] if sample else []))
    return rows


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join("data", "survey")
    os.makedirs(out_dir, exist_ok=True)
    header = ["case_id", "choice", "narrative", "elapsed_s"]

    with open(os.path.join(out_dir, "cfstories_records.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for case_id, cls, counts, accurate in CASES:
            w.writerows(case_rows(case_id, cls, counts, accurate, None))

    with open(os.path.join(out_dir, "full_records.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header + ["sample"])
        for case_id, cls, counts, accurate in CASES:
            w.writerows(case_rows(case_id, cls, counts, accurate, "CFstories (with CF)"))
        for (case_id, cls, _, _), (n, k) in zip(CASES, BASELINE):
            counts = (n - k, k // 2, k - k // 2)
            w.writerows(case_rows(case_id, cls, counts, 0, "Baseline (without CF)"))

    with open(os.path.join(out_dir, "empty_records.csv"), "w", newline="") as f:
        csv.writer(f, lineterminator="\n").writerow(header)


if __name__ == "__main__":
    main()
