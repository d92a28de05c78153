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

#include "xstory/force_plot.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "testing/random_ensemble.hpp"

namespace xstory::shap {
namespace {

DecisionTree stump_on(int feature, double left, double right) {
  return DecisionTree::from_nodes({{0, NodeKind::kInternal, feature, 0.5, 1, 2, 0.0},
                                   {1, NodeKind::kLeaf, -1, 0.0, -1, -1, left},
                                   {2, NodeKind::kLeaf, -1, 0.0, -1, -1, right}},
                                  2);
}

ShapTable two_stump_table() {
  const TreeEnsemble e({"x", "y"}, {"neg", "pos"}, {stump_on(0, 0.2, 0.8), stump_on(1, 0.9, 0.3)});
  const auto names = e.feature_names();
  return tree_shap(e, testing::to_instance(names, {1.0, 1.0}),
                   testing::to_background(names, {{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}));
}

TEST(ForcePlotTest, SignedWidthsSumToScoreGap) {
  const ShapTable t = two_stump_table();
  const ForcePlotLayout layout = layout_force_plot(t);
  ASSERT_EQ(layout.segments.size(), 2u);
  double signed_total = 0.0;
  for (const ForceSegment& s : layout.segments) {
    EXPECT_GT(s.width(), 0.0);
    signed_total += s.positive ? s.width() : -s.width();
  }
  EXPECT_NEAR(signed_total, t.score - t.base_value, 1e-12);
  EXPECT_TRUE(layout.segments[0].positive);
  EXPECT_EQ(layout.segments[0].label, "x = 1");
  EXPECT_NEAR(layout.segments[0].end, t.score, 1e-12);
  EXPECT_NEAR(layout.segments[1].start, t.score, 1e-12);
}

TEST(ForcePlotTest, ZeroTableHasNoSegments) {
  ShapTable t;
  t.rows = {{"a", "1", 0.0}, {"b", "2", 0.0}};
  t.base_value = t.score = 0.4;
  const ForcePlotLayout layout = layout_force_plot(t);
  EXPECT_TRUE(layout.segments.empty());
  const std::string svg = render_force_plot_svg(layout);
  EXPECT_EQ(svg.find("class=\"segment\""), std::string::npos);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
}

TEST(ForcePlotTest, LargestMagnitudesSitNextToScore) {
  std::mt19937_64 rng(31);
  const TreeEnsemble e = testing::random_ensemble(rng, {7, 12, 5, 5});
  const auto names = e.feature_names();
  const ShapTable t = tree_shap(e, testing::to_instance(names, testing::random_row(rng, 7, 5)),
                                testing::to_background(names, testing::random_matrix(rng, 10, 7, 5)));
  const ForcePlotLayout layout = layout_force_plot(t);
  // Re-sort each side independently by |phi| and compare with layout order.
  for (bool side : {true, false}) {
    std::vector<double> widths;
    for (const ForceSegment& s : layout.segments) {
      if (s.positive == side) widths.push_back(s.width());
    }
    EXPECT_TRUE(std::is_sorted(widths.begin(), widths.end(), std::greater<>()));
  }
  double positive_total = 0.0;
  double negative_total = 0.0;
  for (const ShapRow& r : t.rows) (r.shap_value > 0 ? positive_total : negative_total) += r.shap_value;
  double lo = t.score;
  double hi = t.score;
  for (const ForceSegment& s : layout.segments) {
    lo = std::min(lo, s.start);
    hi = std::max(hi, s.end);
  }
  EXPECT_NEAR(t.score - lo, positive_total, 1e-12);
  EXPECT_NEAR(hi - t.score, -negative_total, 1e-12);
}

TEST(ForcePlotTest, SvgCarriesOneGroupPerSegmentAndEscapes) {
  ShapTable t;
  t.rows = {{"a<b", "x&y", 0.2}, {"c", "1", -0.1}};
  t.base_value = 0.3;
  t.score = 0.4;
  const std::string svg = render_force_plot_svg(layout_force_plot(t));
  std::size_t groups = 0;
  for (std::size_t p = svg.find("class=\"segment\""); p != std::string::npos;
       p = svg.find("class=\"segment\"", p + 1)) {
    ++groups;
  }
  EXPECT_EQ(groups, 2u);
  EXPECT_NE(svg.find("a&lt;b = x&amp;y"), std::string::npos);
  EXPECT_EQ(svg.find("a<b"), std::string::npos);
  EXPECT_NE(svg.find("f(x)"), std::string::npos);
}

}  // namespace
}  // namespace xstory::shap
