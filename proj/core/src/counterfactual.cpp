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

#include "xstory/counterfactual.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace xstory::cf {

const MaskableUnit& MaskableInstance::unit(int unit_id) const {
  for (const MaskableUnit& u : units) {
    if (u.unit_id == unit_id) return u;
  }
  throw std::out_of_range("unknown unit id " + std::to_string(unit_id));
}

namespace {

std::string not_found_message(NotFoundError::Reason reason, double best_score, std::size_t calls) {
  std::ostringstream msg;
  msg << (reason == NotFoundError::Reason::kBudgetExhausted ? "call budget exhausted"
                                                             : "no counterfactual within the size bound")
      << " after " << calls << " predictor calls (best original-class score " << best_score << ")";
  return msg.str();
}

void check_instance(const MaskableInstance& instance) {
  std::set<int> ids;
  for (const MaskableUnit& u : instance.units) {
    if (!ids.insert(u.unit_id).second) {
      throw std::invalid_argument("duplicate unit id " + std::to_string(u.unit_id));
    }
  }
}

// Memoizing, budget-enforcing view of a predictor. A set is sent to the
// predictor at most once.
class Evaluator {
 public:
  Evaluator(const MaskedPredictor& predict, std::size_t budget) : predict_(predict), budget_(budget) {}

  const MaskedPrediction& operator()(const UnitSet& masked) {
    if (auto it = cache_.find(masked); it != cache_.end()) return it->second;
    if (calls_ >= budget_) {
      throw NotFoundError(NotFoundError::Reason::kBudgetExhausted, best_score_, calls_);
    }
    ++calls_;
    auto [it, inserted] = cache_.emplace(masked, predict_(masked));
    if (!masked.empty()) best_score_ = std::min(best_score_, it->second.score);
    return it->second;
  }

  [[nodiscard]] bool seen(const UnitSet& masked) const { return cache_.contains(masked); }
  [[nodiscard]] std::size_t calls() const { return calls_; }
  [[nodiscard]] double best_score() const { return best_score_; }

 private:
  const MaskedPredictor& predict_;
  std::size_t budget_;
  std::size_t calls_ = 0;
  double best_score_ = std::numeric_limits<double>::infinity();
  std::map<UnitSet, MaskedPrediction> cache_;
};

UnitSet prune(Evaluator& evaluate, const std::string& original_class, UnitSet set) {
  bool changed = true;
  while (changed && set.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < set.size(); ++i) {
      UnitSet smaller = set;
      smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(i));
      if (evaluate(smaller).label != original_class) {
        set = std::move(smaller);
        changed = true;
        break;
      }
    }
  }
  return set;
}

bool candidate_less(const TraceEntry& a, const TraceEntry& b) {
  if (a.score != b.score) return a.score < b.score;
  return a.units < b.units;
}

CounterfactualResult finish(Evaluator& evaluate, const MaskableInstance& instance,
                            const std::string& original_class, const UnitSet& flipping,
                            std::vector<TraceEntry> trace) {
  CounterfactualResult result;
  result.original_class = original_class;
  result.cf_units = prune(evaluate, original_class, flipping);
  result.new_class = evaluate(result.cf_units).label;
  for (int id : result.cf_units) result.cf_labels.push_back(instance.unit(id).label);
  result.predictor_calls = evaluate.calls();
  result.trace = std::move(trace);
  return result;
}

}  // namespace

NotFoundError::NotFoundError(Reason reason, double best_score, std::size_t predictor_calls)
    : std::runtime_error(not_found_message(reason, best_score, predictor_calls)),
      reason_(reason),
      best_score_(best_score),
      predictor_calls_(predictor_calls) {}

CounterfactualResult sedc_search(const MaskedPredictor& predict, const MaskableInstance& instance,
                                 std::size_t max_size, std::size_t call_budget) {
  if (max_size < 1) throw std::invalid_argument("sedc_search: max_size must be at least 1");
  check_instance(instance);

  Evaluator evaluate(predict, call_budget);
  const std::string original_class = evaluate({}).label;

  std::vector<int> ids;
  for (const MaskableUnit& u : instance.units) ids.push_back(u.unit_id);
  std::sort(ids.begin(), ids.end());

  std::vector<TraceEntry> trace;
  std::vector<TraceEntry> frontier;

  // Evaluates a batch of candidates, records them in score-then-id order and
  // returns the best flipping one, if any.
  auto expand = [&](std::vector<UnitSet> candidates) -> const TraceEntry* {
    std::vector<TraceEntry> batch;
    batch.reserve(candidates.size());
    for (UnitSet& c : candidates) {
      const MaskedPrediction& p = evaluate(c);
      batch.push_back({std::move(c), p.score, p.label});
    }
    std::sort(batch.begin(), batch.end(), candidate_less);
    const std::size_t first_new = trace.size();
    for (TraceEntry& e : batch) trace.push_back(e);
    for (std::size_t i = first_new; i < trace.size(); ++i) {
      if (trace[i].label != original_class) return &trace[i];
    }
    for (TraceEntry& e : batch) frontier.push_back(std::move(e));
    return nullptr;
  };

  std::vector<UnitSet> singletons;
  for (int id : ids) singletons.push_back({id});
  if (const TraceEntry* hit = expand(std::move(singletons))) {
    const UnitSet flipping = hit->units;
    return finish(evaluate, instance, original_class, flipping, std::move(trace));
  }

  while (true) {
    auto best = frontier.end();
    for (auto it = frontier.begin(); it != frontier.end(); ++it) {
      if (it->units.size() >= max_size) continue;
      if (best == frontier.end() || candidate_less(*it, *best)) best = it;
    }
    if (best == frontier.end()) {
      throw NotFoundError(NotFoundError::Reason::kSizeBound, evaluate.best_score(), evaluate.calls());
    }
    const UnitSet base = best->units;
    frontier.erase(best);

    std::vector<UnitSet> children;
    for (int id : ids) {
      if (std::binary_search(base.begin(), base.end(), id)) continue;
      UnitSet child = base;
      child.insert(std::upper_bound(child.begin(), child.end(), id), id);
      if (evaluate.seen(child)) continue;
      children.push_back(std::move(child));
    }
    if (const TraceEntry* hit = expand(std::move(children))) {
      const UnitSet flipping = hit->units;
      return finish(evaluate, instance, original_class, flipping, std::move(trace));
    }
  }
}

UnitSet prune_irreducible(const MaskedPredictor& predict, const MaskableInstance& instance,
                          const UnitSet& cf_set) {
  check_instance(instance);
  Evaluator evaluate(predict, std::numeric_limits<std::size_t>::max());
  UnitSet set = cf_set;
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  for (int id : set) (void)instance.unit(id);
  const std::string original_class = evaluate({}).label;
  if (set.empty() || evaluate(set).label == original_class) {
    throw std::invalid_argument("prune_irreducible: the given set does not flip the class");
  }
  return prune(evaluate, original_class, std::move(set));
}

CounterfactualResult exhaustive_min_cf(const MaskedPredictor& predict,
                                       const MaskableInstance& instance, std::size_t max_size) {
  check_instance(instance);
  const std::size_t n = instance.units.size();
  if (n > kMaxExhaustiveUnits) {
    throw std::invalid_argument("exhaustive_min_cf: " + std::to_string(n) + " units exceeds the limit of " +
                                std::to_string(kMaxExhaustiveUnits));
  }
  Evaluator evaluate(predict, std::numeric_limits<std::size_t>::max());
  const std::string original_class = evaluate({}).label;

  std::vector<int> ids;
  for (const MaskableUnit& u : instance.units) ids.push_back(u.unit_id);
  std::sort(ids.begin(), ids.end());

  std::vector<TraceEntry> trace;
  const std::size_t limit = std::min(max_size, n);
  for (std::size_t size = 1; size <= limit; ++size) {
    // Lexicographic k-combinations of positions.
    std::vector<std::size_t> pos(size);
    for (std::size_t i = 0; i < size; ++i) pos[i] = i;
    while (true) {
      UnitSet set;
      for (std::size_t p : pos) set.push_back(ids[p]);
      const MaskedPrediction& prediction = evaluate(set);
      trace.push_back({set, prediction.score, prediction.label});
      if (prediction.label != original_class) {
        CounterfactualResult result;
        result.original_class = original_class;
        result.new_class = prediction.label;
        result.cf_units = set;
        for (int id : set) result.cf_labels.push_back(instance.unit(id).label);
        result.predictor_calls = evaluate.calls();
        result.trace = std::move(trace);
        return result;
      }
      std::size_t i = size;
      while (i > 0 && pos[i - 1] == n - size + (i - 1)) --i;
      if (i == 0) break;
      ++pos[i - 1];
      for (std::size_t j = i; j < size; ++j) pos[j] = pos[j - 1] + 1;
    }
  }
  throw NotFoundError(NotFoundError::Reason::kSizeBound, evaluate.best_score(), evaluate.calls());
}

std::vector<double> apply_mask(std::span<const double> features, std::span<const double> reference,
                               const UnitSet& masked) {
  std::vector<double> out(features.begin(), features.end());
  for (int id : masked) out.at(static_cast<std::size_t>(id)) = reference[static_cast<std::size_t>(id)];
  return out;
}

TabularMasking make_tabular_masking(const TreeEnsemble& ensemble, std::vector<double> features,
                                    std::vector<double> reference, double threshold) {
  if (features.size() != ensemble.num_features() || reference.size() != ensemble.num_features()) {
    throw std::invalid_argument("make_tabular_masking: feature/reference width mismatch");
  }
  TabularMasking masking;
  for (std::size_t i = 0; i < ensemble.num_features(); ++i) {
    masking.instance.units.push_back({static_cast<int>(i), ensemble.feature_names()[i]});
  }
  const double original_score = ensemble.predict(features);
  const bool original_positive = original_score >= threshold;
  masking.predictor = [&ensemble, features = std::move(features), reference = std::move(reference),
                       threshold, original_positive](const UnitSet& masked) {
    const double p = ensemble.predict(apply_mask(features, reference, masked));
    MaskedPrediction out;
    out.label = predict_label(p, threshold, ensemble.class_labels());
    out.score = original_positive ? p : 1.0 - p;
    return out;
  };
  return masking;
}

}  // namespace xstory::cf
