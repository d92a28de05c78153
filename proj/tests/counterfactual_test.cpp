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
#include <random>

#include <gtest/gtest.h>

#include "testing/random_ensemble.hpp"

namespace xstory::cf {
namespace {

MaskableInstance units(int n) {
  MaskableInstance instance;
  for (int i = 0; i < n; ++i) instance.units.push_back({i, "u" + std::to_string(i)});
  return instance;
}

bool contains(const UnitSet& s, int id) { return std::binary_search(s.begin(), s.end(), id); }

// Re-predicts every single removal independently of the library's pruning.
bool irreducible(const MaskedPredictor& predict, const UnitSet& set, const std::string& original) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    UnitSet smaller = set;
    smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(i));
    if (predict(smaller).label != original) return false;
  }
  return true;
}

TEST(CounterfactualTest, SingletonFlipIsFoundFirst) {
  const MaskedPredictor predict = [](const UnitSet& m) -> MaskedPrediction {
    if (contains(m, 3)) return {"other", 0.2};
    return {"orig", 0.9 - 0.05 * static_cast<double>(m.size())};
  };
  const auto r = sedc_search(predict, units(6), 4, 1000);
  EXPECT_EQ(r.cf_units, UnitSet{3});
  EXPECT_EQ(r.new_class, "other");
  EXPECT_EQ(r.cf_labels, std::vector<std::string>{"u3"});
  EXPECT_EQ(r.predictor_calls, 7u);  // unmasked input plus six singletons
  EXPECT_EQ(exhaustive_min_cf(predict, units(6), 4).cf_units, UnitSet{3});
}

TEST(CounterfactualTest, GreedyExpandsLowestScore) {
  // Unit 0 removes the most evidence, but only {1, 2} flips.
  const MaskedPredictor predict = [](const UnitSet& m) -> MaskedPrediction {
    if (contains(m, 1) && contains(m, 2)) return {"b", 0.1};
    double s = 0.9;
    if (contains(m, 0)) s -= 0.3;
    if (contains(m, 1)) s -= 0.2;
    if (contains(m, 2)) s -= 0.1;
    return {"a", s};
  };
  const auto r = sedc_search(predict, units(3), 3, 100);
  EXPECT_EQ(r.cf_units, (UnitSet{1, 2}));
  // Trace: singletons by score, then children of {0}, then the flip.
  ASSERT_GE(r.trace.size(), 5u);
  EXPECT_EQ(r.trace[0].units, UnitSet{0});
  EXPECT_EQ(r.trace[1].units, UnitSet{1});
  EXPECT_EQ(r.trace[2].units, UnitSet{2});
  EXPECT_EQ(r.trace[3].units, (UnitSet{0, 1}));
}

TEST(CounterfactualTest, FullSetOnlyFlip) {
  const MaskedPredictor predict = [](const UnitSet& m) -> MaskedPrediction {
    if (m.size() == 4) return {"new", 0.3};
    return {"old", 0.9 - 0.1 * static_cast<double>(m.size())};
  };
  const auto oracle = exhaustive_min_cf(predict, units(4), 4);
  EXPECT_EQ(oracle.cf_units, (UnitSet{0, 1, 2, 3}));
  EXPECT_EQ(sedc_search(predict, units(4), 4, 1000).cf_units, (UnitSet{0, 1, 2, 3}));
  try {
    exhaustive_min_cf(predict, units(4), 3);
    FAIL() << "expected NotFoundError";
  } catch (const NotFoundError& e) {
    EXPECT_EQ(e.reason(), NotFoundError::Reason::kSizeBound);
  }
}

TEST(CounterfactualTest, NotFoundDistinguishesBudgetFromSize) {
  const MaskedPredictor never = [](const UnitSet& m) -> MaskedPrediction {
    return {"same", 0.9 - 0.01 * static_cast<double>(m.size())};
  };
  try {
    sedc_search(never, units(5), 2, 1000);
    FAIL();
  } catch (const NotFoundError& e) {
    EXPECT_EQ(e.reason(), NotFoundError::Reason::kSizeBound);
    EXPECT_NEAR(e.best_score(), 0.88, 1e-12);
    EXPECT_EQ(e.predictor_calls(), 1u + 5u + 10u);
  }
  try {
    sedc_search(never, units(5), 5, 4);
    FAIL();
  } catch (const NotFoundError& e) {
    EXPECT_EQ(e.reason(), NotFoundError::Reason::kBudgetExhausted);
    EXPECT_LE(e.predictor_calls(), 4u);
  }
}

TEST(CounterfactualTest, BudgetCoversPruning) {
  // {0,1,2} is reached first; pruning needs extra calls.
  const MaskedPredictor predict = [](const UnitSet& m) -> MaskedPrediction {
    if (contains(m, 2) && m.size() >= 2 && contains(m, 0)) return {"b", 0.2};
    double s = 0.9;
    for (int u : m) s -= u == 0 ? 0.3 : 0.1;
    return {"a", s};
  };
  const auto full = sedc_search(predict, units(3), 3, 1000);
  for (std::size_t budget = 0; budget <= full.predictor_calls + 1; ++budget) {
    try {
      const auto r = sedc_search(predict, units(3), 3, budget);
      EXPECT_LE(r.predictor_calls, budget);
      EXPECT_EQ(r.cf_units, full.cf_units);
    } catch (const NotFoundError& e) {
      EXPECT_EQ(e.reason(), NotFoundError::Reason::kBudgetExhausted);
      EXPECT_LT(budget, full.predictor_calls);
    }
  }
}

TEST(CounterfactualTest, PruneExamples) {
  const MaskedPredictor predict = [](const UnitSet& m) -> MaskedPrediction {
    return contains(m, 0) ? MaskedPrediction{"y", 0.1} : MaskedPrediction{"x", 0.9};
  };
  EXPECT_EQ(prune_irreducible(predict, units(3), {0}), UnitSet{0});
  EXPECT_EQ(prune_irreducible(predict, units(3), {0, 1}), UnitSet{0});
  EXPECT_THROW(prune_irreducible(predict, units(3), {1, 2}), std::invalid_argument);
}

TEST(CounterfactualTest, RandomFixturesAreValidIrreducibleAndNoSmallerThanOracle) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + trial % 8;
    const auto model = testing::random_unit_model(rng, n);
    const MaskedPredictor predict = model;
    const std::string original = predict({}).label;
    std::size_t oracle_size = 0;
    try {
      oracle_size = exhaustive_min_cf(predict, model.instance, n).cf_units.size();
    } catch (const NotFoundError&) {
      EXPECT_THROW(sedc_search(predict, model.instance, n, 100000), NotFoundError);
      continue;
    }
    // With an unbounded budget best-first search eventually visits every
    // subset up to max_size, so it must find a flip whenever one exists.
    const auto r = sedc_search(predict, model.instance, n, 100000);
    EXPECT_NE(predict(r.cf_units).label, original);
    EXPECT_EQ(predict(r.cf_units).label, r.new_class);
    EXPECT_TRUE(irreducible(predict, r.cf_units, original));
    EXPECT_GE(r.cf_units.size(), oracle_size);
    if (oracle_size == 1) {
      EXPECT_EQ(r.cf_units.size(), 1u);
    }
  }
}

TEST(CounterfactualTest, TraceIsDeterministic) {
  std::mt19937_64 rng(43);
  const auto model = testing::random_unit_model(rng, 8);
  const MaskedPredictor predict = model;
  try {
    const auto a = sedc_search(predict, model.instance, 8, 100000);
    const auto b = sedc_search(predict, model.instance, 8, 100000);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      EXPECT_EQ(a.trace[i].units, b.trace[i].units);
      EXPECT_EQ(a.trace[i].score, b.trace[i].score);
    }
  } catch (const NotFoundError&) {
    GTEST_SKIP() << "fixture has no counterfactual";
  }
}

TEST(CounterfactualTest, ExhaustiveRejectsLargeInstances) {
  const MaskedPredictor predict = [](const UnitSet&) { return MaskedPrediction{"a", 0.5}; };
  EXPECT_THROW(exhaustive_min_cf(predict, units(13), 2), std::invalid_argument);
  MaskableInstance dup = units(2);
  dup.units[1].unit_id = 0;
  EXPECT_THROW(sedc_search(predict, dup, 2, 10), std::invalid_argument);
}

TEST(CounterfactualTest, TabularMaskingFlipsOnRePrediction) {
  std::mt19937_64 rng(47);
  int found = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const TreeEnsemble e = testing::random_ensemble(rng, {5, 6, 4, 4});
    const auto x = testing::random_row(rng, 5, 4);
    const auto reference = testing::random_row(rng, 5, 4);
    const TabularMasking masking = make_tabular_masking(e, x, reference);
    try {
      const auto r = sedc_search(masking.predictor, masking.instance, 5, 10000);
      const double before = e.predict(x);
      const double after = e.predict(apply_mask(x, reference, r.cf_units));
      EXPECT_NE(before >= 0.5, after >= 0.5);
      EXPECT_EQ(r.cf_labels[0], e.feature_names()[r.cf_units[0]]);
      ++found;
    } catch (const NotFoundError&) {
    }
  }
  EXPECT_GT(found, 0);
}

TEST(CounterfactualTest, ApplyMaskReplacesOnlyMaskedFeatures) {
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> ref{9, 8, 7};
  EXPECT_EQ(apply_mask(x, ref, {0, 2}), (std::vector<double>{9, 2, 7}));
  EXPECT_EQ(apply_mask(x, ref, {}), x);
}

}  // namespace
}  // namespace xstory::cf
