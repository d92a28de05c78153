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

#include "xstory/dataset.hpp"

#include <algorithm>

#include <gtest/gtest.h>

#include "testing/temp_dir.hpp"
#include "xstory/error.hpp"

namespace xstory {
namespace {

using testing::TempDir;

const std::vector<std::string> kFeatures{"age", "romantic"};

TEST(DatasetTest, ReadsFeaturesLabelsAndIds) {
  TempDir dir;
  const auto path = dir.write("d.csv", "id,romantic,age,label\na,1,17,fail\nb,0,16.5,pass\n");
  const Dataset d = read_dataset(path, &kFeatures);
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(d.rows[1].values.at("age"), 16.5);
  EXPECT_EQ(*d.labels[0], "fail");
  EXPECT_EQ(*d.ids[1], "b");
  EXPECT_EQ(select_row(d, "1"), 1u);
  EXPECT_EQ(select_row(d, "id:a"), 0u);
  EXPECT_THROW(select_row(d, "2"), InputError);
  EXPECT_THROW(select_row(d, "id:zz"), InputError);
  EXPECT_THROW(select_row(d, "first"), InputError);
}

TEST(DatasetTest, MissingValueNamesFileAndLine) {
  TempDir dir;
  const auto path = dir.write("d.csv", "age,romantic\n17,1\n18,\n");
  try {
    read_dataset(path, &kFeatures);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("d.csv:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("missing value"), std::string::npos) << msg;
  }
}

TEST(DatasetTest, NonFiniteValueRejected) {
  TempDir dir;
  EXPECT_THROW(read_dataset(dir.write("d.csv", "age,romantic\ninf,1\n"), &kFeatures), InputError);
  EXPECT_THROW(read_dataset(dir.write("e.csv", "age,romantic\nx,1\n"), &kFeatures), InputError);
}

TEST(DatasetTest, SchemaMismatchOnMissingOrExtraColumn) {
  TempDir dir;
  EXPECT_THROW(read_dataset(dir.write("d.csv", "age\n17\n"), &kFeatures), SchemaMismatchError);
  EXPECT_THROW(read_dataset(dir.write("e.csv", "age,romantic,height\n17,1,2\n"), &kFeatures),
               SchemaMismatchError);
}

TEST(DatasetTest, FeatureVectorRequiresExactSchema) {
  TabularInstance x;
  x.values = {{"age", 17.0}};
  EXPECT_THROW(to_feature_vector(kFeatures, x), SchemaMismatchError);
  x.values["romantic"] = 1.0;
  EXPECT_EQ(to_feature_vector(kFeatures, x), (std::vector<double>{17.0, 1.0}));
  x.values["extra"] = 0.0;
  EXPECT_THROW(to_feature_vector(kFeatures, x), SchemaMismatchError);
}

TEST(DatasetTest, DisplaySidecarOverridesNumericText) {
  TempDir dir;
  Dataset d = read_dataset(dir.write("d.csv", "age,romantic\n17,1\n16,0\n"), &kFeatures);
  attach_display_values(d, dir.write("s.csv", "age,romantic\n,yes\n,no\n"));
  EXPECT_EQ(d.rows[0].display("romantic"), "yes");
  EXPECT_EQ(d.rows[0].display("age"), "17");
  EXPECT_THROW(attach_display_values(d, dir.write("t.csv", "age,romantic\n,yes\n")), InputError);
}

TEST(DatasetTest, BackgroundSampleIsSeededSubsetInOrder) {
  Dataset d;
  d.feature_names = {"v"};
  for (int i = 0; i < 50; ++i) {
    TabularInstance x;
    x.values["v"] = i;
    d.rows.push_back(x);
    d.labels.emplace_back();
    d.ids.emplace_back();
  }
  const auto a = sample_background(d, 10, 3);
  const auto b = sample_background(d, 10, 3);
  const auto c = sample_background(d, 10, 4);
  ASSERT_EQ(a.instances.size(), 10u);
  std::vector<double> va, vb, vc;
  for (const auto& x : a.instances) va.push_back(x.values.at("v"));
  for (const auto& x : b.instances) vb.push_back(x.values.at("v"));
  for (const auto& x : c.instances) vc.push_back(x.values.at("v"));
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
  EXPECT_TRUE(std::is_sorted(va.begin(), va.end()));
  EXPECT_EQ(std::adjacent_find(va.begin(), va.end()), va.end());
  EXPECT_EQ(sample_background(d, 100, 0).instances.size(), 50u);
}

TEST(DatasetTest, BackgroundMeans) {
  BackgroundSet bg;
  for (double v : {1.0, 2.0, 6.0}) {
    TabularInstance x;
    x.values = {{"age", v}, {"romantic", v > 1.5 ? 1.0 : 0.0}};
    bg.instances.push_back(x);
  }
  const auto m = background_means(kFeatures, bg);
  EXPECT_DOUBLE_EQ(m[0], 3.0);
  EXPECT_DOUBLE_EQ(m[1], 2.0 / 3.0);
}

TEST(DatasetTest, FormatNumberIsShortestRoundTrip) {
  EXPECT_EQ(format_number(22.0), "22");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(0.1 + 0.2), "0.30000000000000004");
}

}  // namespace
}  // namespace xstory
