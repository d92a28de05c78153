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

#include "xstory/eval.hpp"

#include <cctype>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "json.hpp"
#include "testing/temp_dir.hpp"
#include "xstory/error.hpp"
#include "xstory/survey_io.hpp"

namespace xstory::eval {
namespace {

KeywordSet lighthouse() { return {"lighthouse", "cloud", {"cloud", "clouds"}}; }

// Upper tail by Simpson integration of the normal density, independent of erfc.
double simpson_upper_tail(double z) {
  if (z < 0) return 1.0 - simpson_upper_tail(-z);
  const double hi = z + 12.0;
  const int steps = 20000;
  const double h = (hi - z) / steps;
  auto pdf = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
  double sum = pdf(z) + pdf(hi);
  for (int i = 1; i < steps; ++i) sum += pdf(z + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

TEST(EvalTest, ProportionTestKnownValues) {
  const ProportionTest t = proportion_ztest(24, 36);
  EXPECT_NEAR(t.z, 2.0, 1e-12);
  EXPECT_NEAR(t.p_value, 0.02275, 5e-5);
  EXPECT_NEAR(t.p_hat, 24.0 / 36.0, 1e-15);
  EXPECT_NEAR(proportion_ztest(20, 40).p_value, 0.5, 1e-15);
  EXPECT_LT(proportion_ztest(178, 236).p_value, 1e-6);
  EXPECT_LT(proportion_ztest(349, 492).p_value, 1e-6);
}

TEST(EvalTest, ProportionTestRejectsBadInput) {
  EXPECT_THROW(proportion_ztest(0, 0), std::invalid_argument);
  EXPECT_THROW(proportion_ztest(5, 4), std::invalid_argument);
  EXPECT_THROW(proportion_ztest(1, 4, 0.0), std::invalid_argument);
  EXPECT_THROW(proportion_ztest(1, 4, 1.0), std::invalid_argument);
}

TEST(EvalTest, NormalTailMatchesNumericalIntegration) {
  for (double z = -4.0; z <= 6.0; z += 0.37) {
    EXPECT_NEAR(normal_upper_tail(z), simpson_upper_tail(z), 1e-9) << "z=" << z;
  }
}

TEST(EvalTest, ProportionTestProperties) {
  for (std::size_t n = 1; n <= 60; ++n) {
    double previous = 2.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const ProportionTest t = proportion_ztest(k, n);
      EXPECT_GE(t.p_value, 0.0);
      EXPECT_LE(t.p_value, 1.0);
      EXPECT_LE(t.p_value, previous) << k << "/" << n;  // monotone in k
      previous = t.p_value;
      const ProportionTest mirror = proportion_ztest(n - k, n);
      EXPECT_NEAR(t.z, -mirror.z, 1e-12);
      EXPECT_NEAR(t.p_value + mirror.p_value, 1.0, 1e-12);
    }
  }
}

TEST(EvalTest, PValueFormatting) {
  EXPECT_EQ(format_p_value(0.0227501), "0.0228");
  EXPECT_EQ(format_p_value(4.9e-5), "0.000");
  EXPECT_EQ(format_p_value(0.0), "0.000");
  EXPECT_EQ(format_p_value(0.5), "0.5000");
  EXPECT_EQ(format_percent(75.42), "75.4");
}

TEST(EvalTest, WholeWordMatching) {
  EXPECT_TRUE(narrative_accuracy("The cloud's shape and position", lighthouse()));
  EXPECT_TRUE(narrative_accuracy("CLOUDS everywhere", lighthouse()));
  EXPECT_FALSE(narrative_accuracy("cloudy thoughts", lighthouse()));
  EXPECT_FALSE(narrative_accuracy("", lighthouse()));
  EXPECT_FALSE(narrative_accuracy("a thundercloud", lighthouse()));
  const KeywordSet multi{"x", "soccer ball", {"soccer ball"}};
  EXPECT_TRUE(narrative_accuracy("looks like a Soccer-ball to me", multi));
  EXPECT_FALSE(narrative_accuracy("soccer is played with a ball", multi));
}

// Tokenizer oracle: split on anything that is not an ASCII letter.
std::vector<std::string> oracle_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (unsigned char c : text) {
    const bool letter = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (letter) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

TEST(EvalTest, AccuracyAgreesWithTokenOracle) {
  const std::vector<std::string> vocabulary = {"cloud", "clouds", "cloudy", "sky", "Cloud", "the", "x"};
  const std::string separators = " ,.'-!?\n0\xC3\xA9";
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const int words = static_cast<int>(rng() % 8);
    for (int w = 0; w < words; ++w) {
      text += vocabulary[rng() % vocabulary.size()];
      text += separators[rng() % separators.size()];
    }
    const auto tokens = oracle_tokens(text);
    EXPECT_EQ(letter_tokens(text), tokens) << text;
    const bool expected = std::find(tokens.begin(), tokens.end(), "cloud") != tokens.end() ||
                          std::find(tokens.begin(), tokens.end(), "clouds") != tokens.end();
    EXPECT_EQ(narrative_accuracy(text, lighthouse()), expected) << text;
  }
}

TEST(EvalTest, KeywordSetValidation) {
  EXPECT_NO_THROW(validate(lighthouse()));
  EXPECT_THROW(validate({"", "cloud", {"cloud"}}), std::invalid_argument);
  EXPECT_THROW(validate({"c", "cloud", {}}), std::invalid_argument);
  EXPECT_THROW(validate({"c", "cloud", {"sky"}}), std::invalid_argument);
}

TEST(EvalTest, CfStoryTextsAreAccurate) {
  const auto keywords = read_keyword_sets(XSTORY_DATA_DIR "/survey/keywords.json");
  const auto stories = nlohmann::json::parse(testing::slurp(XSTORY_GOLDEN_DIR "/cfstories_narratives.json"));
  ASSERT_EQ(stories.size(), keywords.size());
  for (const auto& story : stories) {
    const auto it = std::find_if(keywords.begin(), keywords.end(),
                                 [&](const KeywordSet& k) { return k.case_id == story["case_id"]; });
    ASSERT_NE(it, keywords.end());
    EXPECT_TRUE(narrative_accuracy(story["text"].get<std::string>(), *it)) << it->case_id;
  }
}

std::vector<ResponseRecord> records_for(const std::string& case_id, std::size_t own, std::size_t similar,
                                        std::size_t llm, const std::string& text = "no concept here") {
  std::vector<ResponseRecord> out;
  auto add = [&](Choice c, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) out.push_back({case_id, c, text, std::nullopt, "", 0});
  };
  add(Choice::kOwn, own);
  add(Choice::kSimilar, similar);
  add(Choice::kLlm, llm);
  return out;
}

TEST(EvalTest, AggregationCountsChoices) {
  auto records = records_for("lighthouse", 12, 12, 12);
  for (int i = 0; i < 4; ++i) records[i].narrative_text = "the cloud did it";
  records[4].narrative_text = "cloudy thoughts";
  const SurveyReport report = aggregate_survey(records, {lighthouse(), {"remote", "person", {"person"}}});
  ASSERT_EQ(report.cases.size(), 1u);
  const CaseRow& row = report.cases[0];
  EXPECT_EQ(row.n, 36u);
  EXPECT_NEAR(row.own_pct, 100.0 / 3.0, 1e-9);
  EXPECT_EQ(row.test.k, 24u);
  EXPECT_EQ(row.accurate, 4u);
  EXPECT_NEAR(row.accuracy, 4.0 / 36.0, 1e-12);
  ASSERT_EQ(report.aggregates.size(), 1u);
  EXPECT_EQ(report.aggregates[0].sample, "Full sample");
  EXPECT_EQ(report.aggregates[0].n, 36u);
}

TEST(EvalTest, AccuracyOfFourOutOfFive) {
  std::vector<ResponseRecord> records = records_for("lighthouse", 5, 0, 0);
  for (int i = 0; i < 4; ++i) records[i].narrative_text = "Clouds resemble smoke.";
  const SurveyReport report = aggregate_survey(records, {lighthouse()});
  EXPECT_NEAR(report.cases[0].accuracy, 0.8, 1e-12);
}

TEST(EvalTest, AllOwnChoicesAreNotSignificant) {
  const SurveyReport report = aggregate_survey(records_for("lighthouse", 30, 0, 0), {lighthouse()});
  EXPECT_GE(report.cases[0].test.p_value, 0.5);
  EXPECT_EQ(report.cases[0].test.k, 0u);
}

TEST(EvalTest, UnknownCaseNamesTheLine) {
  auto records = records_for("lighthouse", 1, 0, 0);
  records.push_back({"moon", Choice::kOwn, "x", std::nullopt, "", 9});
  try {
    (void)aggregate_survey(records, {lighthouse()});
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 9"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("moon"), std::string::npos);
  }
}

TEST(EvalTest, EmptyRecordsGiveEmptyReport) {
  const SurveyReport report = aggregate_survey({}, {lighthouse()});
  EXPECT_TRUE(report.cases.empty());
  EXPECT_TRUE(report.aggregates.empty());
  EXPECT_FALSE(report_to_text(report).empty());
}

TEST(EvalTest, SurveyFixtureReproducesPublishedTable) {
  const auto keywords = read_keyword_sets(XSTORY_DATA_DIR "/survey/keywords.json");
  const auto records = read_records(XSTORY_DATA_DIR "/survey/cfstories_records.csv");
  const SurveyReport report = aggregate_survey(records, keywords);
  const std::vector<std::size_t> n = {36, 41, 42, 37, 40, 40};
  const std::vector<std::size_t> k = {24, 37, 24, 25, 33, 35};
  const std::vector<std::string> p = {"0.0228", "0.000", "0.1773", "0.0163", "0.000", "0.000"};
  ASSERT_EQ(report.cases.size(), 6u);
  std::size_t total = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(report.cases[i].n, n[i]) << report.cases[i].case_id;
    EXPECT_EQ(report.cases[i].test.k, k[i]) << report.cases[i].case_id;
    EXPECT_EQ(format_p_value(report.cases[i].test.p_value), p[i]) << report.cases[i].case_id;
    EXPECT_GE(report.cases[i].accuracy, 0.0);
    EXPECT_LE(report.cases[i].accuracy, 1.0);
    total += report.cases[i].n;
  }
  EXPECT_EQ(total, 236u);
  ASSERT_EQ(report.aggregates.size(), 1u);
  EXPECT_EQ(report.aggregates[0].n, 236u);
  EXPECT_EQ(report.aggregates[0].test.k, 178u);
  EXPECT_EQ(format_percent(report.aggregates[0].mean * 100.0), "75.4");
}

TEST(EvalTest, FullSampleSplitsBySample) {
  const auto keywords = read_keyword_sets(XSTORY_DATA_DIR "/survey/keywords.json");
  const SurveyReport report = aggregate_survey(read_records(XSTORY_DATA_DIR "/survey/full_records.csv"), keywords);
  ASSERT_EQ(report.aggregates.size(), 3u);
  EXPECT_EQ(report.aggregates[0].sample, "Full sample");
  EXPECT_EQ(report.aggregates[0].n, 492u);
  EXPECT_EQ(format_percent(report.aggregates[0].mean * 100.0), "70.9");
  EXPECT_LT(report.aggregates[0].test.p_value, 1e-6);
  EXPECT_EQ(report.aggregates[1].n, 236u);
  EXPECT_EQ(format_percent(report.aggregates[1].mean * 100.0), "75.4");
  EXPECT_EQ(report.aggregates[2].n, 256u);
  EXPECT_EQ(format_percent(report.aggregates[2].mean * 100.0), "66.8");
}

TEST(EvalTest, ReportRenderings) {
  const SurveyReport report = aggregate_survey(records_for("lighthouse", 12, 12, 12), {lighthouse()});
  const std::string text = report_to_text(report);
  EXPECT_NE(text.find("lighthouse"), std::string::npos);
  EXPECT_NE(text.find("0.0228"), std::string::npos);
  EXPECT_NE(text.find("Full sample"), std::string::npos);
  const std::string csv = report_to_csv(report);
  EXPECT_EQ(csv.rfind("section,name,n,", 0), 0u);
  EXPECT_NE(csv.find("case,lighthouse,36,"), std::string::npos);
  EXPECT_NE(csv.find("aggregate,Full sample,36,"), std::string::npos);
}

TEST(EvalTest, ChoiceParsing) {
  EXPECT_EQ(parse_choice("own"), Choice::kOwn);
  EXPECT_EQ(parse_choice("Similar"), Choice::kSimilar);
  EXPECT_EQ(parse_choice("LLM"), Choice::kLlm);
  EXPECT_FALSE(parse_choice("mine").has_value());
  for (Choice c : {Choice::kOwn, Choice::kSimilar, Choice::kLlm}) EXPECT_EQ(parse_choice(to_string(c)), c);
}

}  // namespace
}  // namespace xstory::eval
