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

#include <charconv>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "xstory/llm_client.hpp"

namespace xstory::narrative {

namespace {

// Text between `after` and the next occurrence of `until`, or nullopt.
std::optional<std::string> between(std::string_view text, std::string_view after, std::string_view until) {
  const std::size_t start = text.find(after);
  if (start == std::string_view::npos) return std::nullopt;
  const std::size_t from = start + after.size();
  const std::size_t end = text.find(until, from);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(from, end - from));
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Mock sentences must not be split by punctuation inside quoted values.
std::string tame(std::string value) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  for (std::size_t i = 0; i < value.size(); ++i) {
    const char c = value[i];
    const bool decimal_point =
        c == '.' && i > 0 && i + 1 < value.size() && digit(value[i - 1]) && digit(value[i + 1]);
    if ((c == '.' || c == '!' || c == '?') && !decimal_point) value[i] = ' ';
  }
  return trim(value);
}

struct TableRow {
  std::string feature;
  std::string value;
  double shap = 0.0;
};

std::vector<TableRow> parse_table(std::string_view prompt) {
  std::vector<TableRow> rows;
  const std::string_view header = "feature | value | shap\n";
  const std::size_t at = prompt.find(header);
  if (at == std::string_view::npos) return rows;
  std::istringstream lines(std::string(prompt.substr(at + header.size())));
  std::string line;
  while (std::getline(lines, line)) {
    const std::size_t a = line.find(" | ");
    const std::size_t b = line.rfind(" | ");
    if (a == std::string::npos || b == a) continue;
    TableRow row{trim(line.substr(0, a)), trim(line.substr(a + 3, b - a - 3)), 0.0};
    const std::string number = trim(line.substr(b + 3));
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), row.shap);
    if (ec != std::errc()) continue;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string shap_reply(const std::vector<TableRow>& rows) {
  std::vector<const TableRow*> pos;
  std::vector<const TableRow*> neg;
  for (const TableRow& r : rows) {
    if (r.shap > 0) pos.push_back(&r);
  }
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->shap < 0) neg.push_back(&*it);
  }
  auto name = [](const TableRow* r) { return tame(r->feature); };
  auto value = [](const TableRow* r) { return tame(r->value); };

  std::vector<std::string> s;
  s.push_back("The model's estimate for this instance is shaped by a handful of dominant factors.");
  s.push_back(pos.empty() ? "No feature pushes the estimate upwards in a meaningful way."
                          : "The strongest upward push comes from " + name(pos[0]) + " being " +
                                value(pos[0]) + ".");
  s.push_back(pos.size() < 2 ? "No other feature adds comparable support."
                             : "It is reinforced by " + name(pos[1]) + " at " + value(pos[1]) + ".");
  s.push_back(neg.empty() ? "Nothing in the record pulls the estimate down to a comparable degree."
                          : "Working in the opposite direction, " + name(neg[0]) + " at " + value(neg[0]) +
                                " weighs most heavily against the outcome.");
  s.push_back(neg.size() < 2 ? "Few other features pull in that direction."
                             : "The value of " + name(neg[1]) + " (" + value(neg[1]) +
                                   ") adds to that counterweight.");
  s.push_back("These factors plausibly interact, each making the others more telling.");
  s.push_back("The remaining features contribute comparatively little to the score.");
  const std::string lead = pos.empty() ? std::string("the weaker factors") : name(pos[0]);
  const std::string drag = neg.empty() ? std::string("the weaker factors") : name(neg[0]);
  s.push_back("In summary, the balance between " + lead + " and " + drag +
              " best explains why the model reached this classification.");

  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += s[i];
  }
  return out;
}

}  // namespace

std::string mock_reply(std::string_view prompt) {
  if (auto cf = between(prompt, "The counterfactual explanation is a ", ":")) {
    const std::string original =
        tame(between(prompt, "misclassified the above image as a ", ". ").value_or("the predicted class"));
    const std::string next =
        tame(between(prompt, "correctly classified as a ", ". ").value_or("the correct class"));
    const std::string label = tame(*cf);
    return "The " + label + " in the image may share the visual pattern the classifier has learned to link "
           "with a " + original + ", so removing the " + label + " lets it recognise the " + next + ".";
  }
  if (prompt.find("Can you reason why this would have happened?") != std::string_view::npos) {
    const std::string original =
        tame(between(prompt, "misclassified the above image as a ", ". ").value_or("the predicted class"));
    return "The classifier might have mistaken the overall shape and outline of the main subject for that "
           "of a " + original + ".";
  }
  if (prompt.find("SHAP") != std::string_view::npos) return shap_reply(parse_table(prompt));
  return "There is no explanation in this prompt to build a story from.";
}

MockChatBackend::MockChatBackend(std::string_view options) {
  if (options.rfind("//", 0) == 0) options.remove_prefix(2);
  while (!options.empty()) {
    const std::size_t comma = options.find(',');
    const std::string_view option = options.substr(0, comma);
    options = comma == std::string_view::npos ? std::string_view() : options.substr(comma + 1);
    if (option.empty()) continue;
    auto number_after = [&](std::string_view prefix) {
      int value = 0;
      const std::string_view digits = option.substr(prefix.size());
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || value < 0) {
        throw std::invalid_argument("mock backend: bad option '" + std::string(option) + "'");
      }
      return value;
    };
    if (option.rfind("fail=", 0) == 0) {
      fail_remaining_ = number_after("fail=");
    } else if (option.rfind("status=", 0) == 0) {
      forced_status_ = number_after("status=");
    } else if (option == "empty") {
      empty_ = true;
    } else {
      throw std::invalid_argument("mock backend: unknown option '" + std::string(option) + "'");
    }
  }
}

AttemptResult MockChatBackend::send(const ChatRequest& request) {
  if (fail_remaining_ > 0) {
    --fail_remaining_;
    return {AttemptResult::Status::kTransport, 0, {}, "mock: simulated connection failure"};
  }
  if (forced_status_ != 0) {
    return {AttemptResult::Status::kHttpStatus, forced_status_, {}, "mock: forced status"};
  }
  if (empty_) return {AttemptResult::Status::kOk, 200, {}, {}};
  return {AttemptResult::Status::kOk, 200, mock_reply(request.user_message), {}};
}

}  // namespace xstory::narrative
