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

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "testing/ensemble_transforms.hpp"
#include "testing/random_ensemble.hpp"
#include "xstory/shap.hpp"

namespace xstory::shap {
namespace {

using testing::EnsembleShape;

TEST(ShapPropertyTest, LocalAccuracy) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t d = 1 + trial % 10;
    const TreeEnsemble e = testing::random_ensemble(rng, {d, static_cast<std::size_t>(1 + trial % 12), 1 + trial % 6, 6});
    const auto x = testing::random_row(rng, d, 6);
    const auto bg = testing::random_matrix(rng, 1 + trial % 15, d, 6);
    const Attribution a = tree_shap_values(e, x, bg);
    const double total = std::accumulate(a.phi.begin(), a.phi.end(), a.base_value);
    EXPECT_NEAR(total, e.predict(x), 1e-9);
    EXPECT_DOUBLE_EQ(a.score, e.predict(x));
  }
}

TEST(ShapPropertyTest, DummyFeatureGetsExactlyZero) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 40; ++trial) {
    const TreeEnsemble e = testing::random_ensemble(rng, {5, 8, 5, 4}, {0, 1, 3, 4});
    const auto x = testing::random_row(rng, 5, 4);
    const auto bg = testing::random_matrix(rng, 7, 5, 4);
    EXPECT_EQ(tree_shap_values(e, x, bg).phi[2], 0.0);
  }
}

TEST(ShapPropertyTest, SwappedTwinsShareAttribution) {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 40; ++trial) {
    const TreeEnsemble base = testing::random_ensemble(rng, {4, 5, 4, 4});
    const TreeEnsemble e = testing::symmetrize(base, 1, 3);
    auto x = testing::random_row(rng, 4, 4);
    x[3] = x[1];
    auto bg = testing::random_matrix(rng, 6, 4, 4);
    for (auto& row : bg) row[3] = row[1];
    const Attribution a = tree_shap_values(e, x, bg);
    EXPECT_NEAR(a.phi[1], a.phi[3], 1e-12);
  }
}

TEST(ShapPropertyTest, FeatureOrderDoesNotChangeValues) {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 6;
    const TreeEnsemble e = testing::random_ensemble(rng, {d, 6, 5, 4});
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const TreeEnsemble p = testing::permute_features(e, perm);
    const auto x = testing::random_row(rng, d, 4);
    const auto bg = testing::random_matrix(rng, 5, d, 4);
    const ShapTable a = tree_shap(e, testing::to_instance(e.feature_names(), x),
                                  testing::to_background(e.feature_names(), bg));
    // Same instance, expressed by name, against the permuted model.
    const ShapTable b = tree_shap(p, testing::to_instance(e.feature_names(), x),
                                  testing::to_background(e.feature_names(), bg));
    for (const ShapRow& row : a.rows) {
      EXPECT_NEAR(b.find(row.feature_name)->shap_value, row.shap_value, 1e-12);
    }
  }
}

TEST(ShapPropertyTest, RepeatedCallsAreBitIdentical) {
  std::mt19937_64 rng(113);
  const TreeEnsemble e = testing::random_ensemble(rng, {8, 20, 6, 5});
  const auto x = testing::random_row(rng, 8, 5);
  const auto bg = testing::random_matrix(rng, 20, 8, 5);
  const Attribution a = tree_shap_values(e, x, bg);
  const Attribution b = tree_shap_values(e, x, bg);
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_EQ(a.base_value, b.base_value);
}

TEST(ShapPropertyTest, TreeShapMatchesExactOnWideEnsembles) {
  std::mt19937_64 rng(127);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t d = 8 + trial;
    const TreeEnsemble e = testing::random_ensemble(rng, {d, 10, 6, 5});
    const auto x = testing::random_row(rng, d, 5);
    const auto bg = testing::random_matrix(rng, 6, d, 5);
    const auto names = e.feature_names();
    const ShapTable exact = exact_shapley(e, testing::to_instance(names, x), testing::to_background(names, bg));
    const Attribution fast = tree_shap_values(e, x, bg);
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(exact.find(names[i])->shap_value, fast.phi[i], 1e-9);
  }
}

}  // namespace
}  // namespace xstory::shap
