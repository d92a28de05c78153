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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "xstory/csv.hpp"
#include "xstory/error.hpp"

namespace xstory::eval {

void validate(const KeywordSet& keywords) {
  if (keywords.case_id.empty()) throw std::invalid_argument("keyword set has an empty case_id");
  if (keywords.accepted_keywords.empty()) {
    throw std::invalid_argument("keyword set '" + keywords.case_id + "' has no accepted keywords");
  }
  const auto want = letter_tokens(keywords.true_cf_label);
  const bool listed = std::any_of(keywords.accepted_keywords.begin(), keywords.accepted_keywords.end(),
                                  [&](const std::string& k) { return letter_tokens(k) == want; });
  if (!listed) {
    throw std::invalid_argument("keyword set '" + keywords.case_id + "': true counterfactual '" +
                                keywords.true_cf_label + "' is not among the accepted keywords");
  }
}

std::vector<std::string> letter_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isalpha(u)) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool narrative_accuracy(std::string_view text, const KeywordSet& keywords) {
  const auto tokens = letter_tokens(text);
  for (const std::string& keyword : keywords.accepted_keywords) {
    const auto needle = letter_tokens(keyword);
    if (needle.empty() || needle.size() > tokens.size()) continue;
    if (std::search(tokens.begin(), tokens.end(), needle.begin(), needle.end()) != tokens.end()) return true;
  }
  return false;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

ProportionTest proportion_ztest(std::size_t k, std::size_t n, double pi0) {
  if (n == 0) throw std::invalid_argument("proportion_ztest: n must be at least 1");
  if (k > n) throw std::invalid_argument("proportion_ztest: k exceeds n");
  if (!(pi0 > 0.0 && pi0 < 1.0)) throw std::invalid_argument("proportion_ztest: pi0 must lie in (0, 1)");
  ProportionTest t;
  t.k = k;
  t.n = n;
  t.pi0 = pi0;
  t.p_hat = static_cast<double>(k) / static_cast<double>(n);
  t.z = (t.p_hat - pi0) / std::sqrt(pi0 * (1.0 - pi0) / static_cast<double>(n));
  t.p_value = std::clamp(normal_upper_tail(t.z), 0.0, 1.0);
  return t;
}

std::optional<Choice> parse_choice(std::string_view text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "own") return Choice::kOwn;
  if (lower == "similar") return Choice::kSimilar;
  if (lower == "llm") return Choice::kLlm;
  return std::nullopt;
}

std::string_view to_string(Choice choice) {
  switch (choice) {
    case Choice::kOwn: return "own";
    case Choice::kSimilar: return "similar";
    case Choice::kLlm: return "llm";
  }
  return "own";
}

namespace {

struct Tally {
  std::size_t n = 0;
  std::size_t own = 0;
  std::size_t similar = 0;
  std::size_t llm = 0;
  std::size_t accurate = 0;

  [[nodiscard]] std::size_t successes() const { return similar + llm; }
};

double pct(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::string fixed(double v, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, v);
  return buffer;
}

}  // namespace

SurveyReport aggregate_survey(const std::vector<ResponseRecord>& records,
                              const std::vector<KeywordSet>& keywords) {
  std::map<std::string, std::size_t> case_index;
  for (std::size_t i = 0; i < keywords.size(); ++i) case_index.emplace(keywords[i].case_id, i);

  std::vector<Tally> per_case(keywords.size());
  Tally full;
  std::vector<std::string> sample_order;
  std::map<std::string, Tally> per_sample;

  for (const ResponseRecord& r : records) {
    auto it = case_index.find(r.case_id);
    if (it == case_index.end()) {
      std::string where = r.line ? "line " + std::to_string(r.line) + ": " : std::string();
      throw InputError(where + "unknown case_id '" + r.case_id + "'");
    }
    Tally& t = per_case[it->second];
    for (Tally* target : {&t, &full}) {
      ++target->n;
      switch (r.choice) {
        case Choice::kOwn: ++target->own; break;
        case Choice::kSimilar: ++target->similar; break;
        case Choice::kLlm: ++target->llm; break;
      }
    }
    if (narrative_accuracy(r.narrative_text, keywords[it->second])) ++t.accurate;
    if (!r.sample.empty()) {
      if (!per_sample.contains(r.sample)) sample_order.push_back(r.sample);
      Tally& s = per_sample[r.sample];
      ++s.n;
      if (r.choice != Choice::kOwn) ++s.similar;
    }
  }

  SurveyReport report;
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    const Tally& t = per_case[i];
    if (t.n == 0) continue;
    CaseRow row;
    row.case_id = keywords[i].case_id;
    row.n = t.n;
    row.own_pct = pct(t.own, t.n);
    row.similar_pct = pct(t.similar, t.n);
    row.llm_pct = pct(t.llm, t.n);
    row.test = proportion_ztest(t.successes(), t.n);
    row.accurate = t.accurate;
    row.accuracy = static_cast<double>(t.accurate) / static_cast<double>(t.n);
    report.cases.push_back(std::move(row));
  }
  if (full.n > 0) {
    report.aggregates.push_back({"Full sample", full.n, static_cast<double>(full.successes()) / full.n,
                                 proportion_ztest(full.successes(), full.n)});
    for (const std::string& name : sample_order) {
      const Tally& s = per_sample[name];
      report.aggregates.push_back({name, s.n, static_cast<double>(s.successes()) / s.n,
                                   proportion_ztest(s.successes(), s.n)});
    }
  }
  return report;
}

std::string format_p_value(double p) { return p < 5e-5 ? "0.000" : fixed(p, 4); }

std::string format_percent(double fraction_times_100) { return fixed(fraction_times_100, 1); }

namespace {

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string report_to_text(const SurveyReport& report) {
  std::size_t w = 12;
  for (const CaseRow& c : report.cases) w = std::max(w, c.case_id.size() + 2);
  for (const AggregateRow& a : report.aggregates) w = std::max(w, a.sample.size() + 2);

  std::string out;
  out += "Per-case convincingness, proportion test and keyword accuracy\n";
  out += pad("case", w) + pad("N", 6) + pad("own%", 8) + pad("similar%", 10) + pad("llm%", 8) +
         pad("mean%", 8) + pad("z", 9) + pad("p-value", 9) + "accuracy%\n";
  for (const CaseRow& c : report.cases) {
    out += pad(c.case_id, w) + pad(std::to_string(c.n), 6) + pad(format_percent(c.own_pct), 8) +
           pad(format_percent(c.similar_pct), 10) + pad(format_percent(c.llm_pct), 8) +
           pad(format_percent(100.0 * c.test.p_hat), 8) + pad(fixed(c.test.z, 4), 9) +
           pad(format_p_value(c.test.p_value), 9) + format_percent(100.0 * c.accuracy) + "\n";
  }
  out += "\nAggregate\n";
  out += pad("sample", w) + pad("N", 6) + pad("mean%", 8) + "p-value\n";
  for (const AggregateRow& a : report.aggregates) {
    out += pad(a.sample, w) + pad(std::to_string(a.n), 6) + pad(format_percent(100.0 * a.mean), 8) +
           format_p_value(a.test.p_value) + "\n";
  }
  return out;
}

std::string report_to_csv(const SurveyReport& report) {
  std::string out =
      "section,name,n,own_pct,similar_pct,llm_pct,successes,mean_pct,z,p_value,accuracy_pct\n";
  for (const CaseRow& c : report.cases) {
    out += csv::join_row({"case", c.case_id, std::to_string(c.n), format_percent(c.own_pct),
                          format_percent(c.similar_pct), format_percent(c.llm_pct), std::to_string(c.test.k),
                          format_percent(100.0 * c.test.p_hat), fixed(c.test.z, 4),
                          format_p_value(c.test.p_value), format_percent(100.0 * c.accuracy)});
    out += "\n";
  }
  for (const AggregateRow& a : report.aggregates) {
    out += csv::join_row({"aggregate", a.sample, std::to_string(a.n), "", "", "", std::to_string(a.test.k),
                          format_percent(100.0 * a.mean), fixed(a.test.z, 4), format_p_value(a.test.p_value),
                          ""});
    out += "\n";
  }
  return out;
}

}  // namespace xstory::eval
