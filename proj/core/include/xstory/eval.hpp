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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xstory::eval {

struct KeywordSet {
  std::string case_id;
  std::string true_cf_label;
  std::vector<std::string> accepted_keywords;  // non-empty, lower-cased on load
};

// Validates the KeywordSet invariants (non-empty, true label accepted).
// Throws std::invalid_argument.
void validate(const KeywordSet& keywords);

// Lower-cased maximal runs of ASCII letters.
std::vector<std::string> letter_tokens(std::string_view text);

// True iff some accepted keyword occurs as a whole word (case-insensitive,
// letter-boundary tokens; multi-word keywords match consecutive tokens). No
// stemming: plurals must be listed.
bool narrative_accuracy(std::string_view text, const KeywordSet& keywords);

struct ProportionTest {
  std::size_t k = 0;
  std::size_t n = 0;
  double pi0 = 0.5;
  double p_hat = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

// One-sample z-test of H0: pi = pi0 against pi > pi0, normal approximation
// without continuity correction. Throws std::invalid_argument for n == 0,
// k > n or pi0 outside (0, 1).
ProportionTest proportion_ztest(std::size_t k, std::size_t n, double pi0 = 0.5);

// Upper-tail probability of the standard normal.
double normal_upper_tail(double z);

enum class Choice { kOwn, kSimilar, kLlm };
std::optional<Choice> parse_choice(std::string_view text);
std::string_view to_string(Choice choice);

struct ResponseRecord {
  std::string case_id;
  Choice choice = Choice::kOwn;
  std::string narrative_text;
  std::optional<double> elapsed_s;
  std::string sample;  // optional grouping (e.g. "cfstories", "baseline")
  std::size_t line = 0;  // source line, 0 when not from a file
};

struct CaseRow {
  std::string case_id;
  std::size_t n = 0;
  double own_pct = 0.0;
  double similar_pct = 0.0;
  double llm_pct = 0.0;
  ProportionTest test;
  std::size_t accurate = 0;
  double accuracy = 0.0;  // fraction in [0, 1]
};

struct AggregateRow {
  std::string sample;
  std::size_t n = 0;
  double mean = 0.0;  // success fraction
  ProportionTest test;
};

struct SurveyReport {
  std::vector<CaseRow> cases;          // keyword-set order
  std::vector<AggregateRow> aggregates;  // "Full sample" first, then per sample
};

// Success means the respondent chose "similar" or "llm". Cases without any
// record are omitted. Throws xstory::InputError naming the record line for an
// unknown case_id.
SurveyReport aggregate_survey(const std::vector<ResponseRecord>& records,
                              const std::vector<KeywordSet>& keywords);

// "0.000" below 5e-5, otherwise four decimals.
std::string format_p_value(double p);
// One decimal.
std::string format_percent(double fraction_times_100);

std::string report_to_text(const SurveyReport& report);
std::string report_to_csv(const SurveyReport& report);

}  // namespace xstory::eval
