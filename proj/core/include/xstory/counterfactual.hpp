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
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xstory/dataset.hpp"
#include "xstory/model.hpp"

namespace xstory::cf {

// Sorted, duplicate-free unit ids.
using UnitSet = std::vector<int>;

struct MaskableUnit {
  int unit_id = 0;
  std::string label;
};

// Model output for an input with some units masked. `score` is the
// probability the model assigns to the class predicted for the unmasked
// input, so lower means more evidence removed.
struct MaskedPrediction {
  std::string label;
  double score = 0.0;
};

// Maps a set of masked units to a prediction. Must be deterministic, and the
// empty set must reproduce the unmasked input.
using MaskedPredictor = std::function<MaskedPrediction(const UnitSet&)>;

struct MaskableInstance {
  std::vector<MaskableUnit> units;  // unit ids unique

  [[nodiscard]] const MaskableUnit& unit(int unit_id) const;
};

struct TraceEntry {
  UnitSet units;
  double score = 0.0;
  std::string label;
};

struct CounterfactualResult {
  std::string original_class;
  std::string new_class;
  UnitSet cf_units;
  std::vector<std::string> cf_labels;  // parallel to cf_units
  std::size_t predictor_calls = 0;
  std::vector<TraceEntry> trace;
};

// Search ended without a class flip. `reason` tells a size bound from an
// exhausted call budget.
class NotFoundError : public std::runtime_error {
 public:
  enum class Reason { kSizeBound, kBudgetExhausted };

  NotFoundError(Reason reason, double best_score, std::size_t predictor_calls);

  [[nodiscard]] Reason reason() const { return reason_; }
  [[nodiscard]] double best_score() const { return best_score_; }
  [[nodiscard]] std::size_t predictor_calls() const { return predictor_calls_; }

 private:
  Reason reason_;
  double best_score_;
  std::size_t predictor_calls_;
};

// Greedy best-first evidence removal. All singletons are evaluated first; the
// non-flipping candidate with the lowest original-class score (ties: lowest
// unit ids) is then grown by one unit at a time until some candidate flips the
// class. The flipping set is pruned to an irreducible one. Every predictor
// call, including the unmasked one and pruning, counts against `call_budget`.
CounterfactualResult sedc_search(const MaskedPredictor& predict, const MaskableInstance& instance,
                                 std::size_t max_size, std::size_t call_budget);

// Repeated single-removal passes (ascending unit id) until no member can be
// dropped without losing the flip. Throws std::invalid_argument when
// `cf_set` does not flip the class.
UnitSet prune_irreducible(const MaskedPredictor& predict, const MaskableInstance& instance,
                          const UnitSet& cf_set);

inline constexpr std::size_t kMaxExhaustiveUnits = 12;

// Minimum-cardinality flipping subset, subsets of equal size visited in
// lexicographic order of unit ids. Throws std::invalid_argument above
// kMaxExhaustiveUnits units and NotFoundError(kSizeBound) when no subset of at
// most `max_size` units flips.
CounterfactualResult exhaustive_min_cf(const MaskedPredictor& predict,
                                       const MaskableInstance& instance, std::size_t max_size);

// Tabular masking: one unit per feature; a masked feature takes its value
// from `reference` (typically the background mean).
struct TabularMasking {
  MaskableInstance instance;
  MaskedPredictor predictor;
};

TabularMasking make_tabular_masking(const TreeEnsemble& ensemble, std::vector<double> features,
                                    std::vector<double> reference, double threshold = 0.5);

// The feature vector produced by masking `masked` units of a tabular instance.
std::vector<double> apply_mask(std::span<const double> features, std::span<const double> reference,
                               const UnitSet& masked);

}  // namespace xstory::cf
