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

#include "xstory/templates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace xstory::narrative {

namespace {

// The SHAP prompt uses typographic quotes: U+2019 around the prediction flag
// and U+201C/U+201D around "payout".
constexpr std::string_view kShapTemplateBody =
    "An AI model was used to predict [classification_task]. The input features of the data include "
    "data about [feature_description]. The target variable is a label stating [label_definition]."
    "\n\n"
    "A certain instance in the test dataset was [correctness]. The AI model predicted a [percentage]% "
    "probability (’[prediction]’) that [predicted_outcome]. The actual outcome was "
    "[actual_outcome]. The provided SHAP table was generated to explain this outcome. It includes every "
    "feature along with its value for that instance, and the SHAP value assigned to it. The goal of SHAP "
    "is to explain the prediction of an instance by computing the contribution of each feature to the "
    "prediction. The SHAP explanation method computes Shapley values from coalitional game theory. The "
    "feature values of a data instance act as players in a coalition. Shapley values tell us how to "
    "fairly distribute the “payout” (= the prediction) among the features. A player can be an "
    "individual feature value, e.g. for tabular data. The scores in the table are sorted from most "
    "positive to most negative."
    "\n\n"
    "Can you come up with a plausible, fluent story as to why the model could have predicted this "
    "outcome, based on the most influential positive and most influential negative SHAP values? Focus "
    "on the features with the highest absolute SHAP values. Try to explain the most important feature "
    "values in this story, as well as potential interactions that fit the story. No need to enumerate "
    "individual features outside of the story. Conclude with a short summary of why this classification "
    "may have occurred. Limit your answer to 8 sentences.";

constexpr std::string_view kShapRunningExampleBody =
    "An AI model was used to predict [classification_task]. The input features of the data include "
    "data about [feature_description]. The target variable is a label stating [label_definition]."
    "\n\n"
    "A certain instance in the test dataset was [correctness]. The AI model predicted a [percentage]% "
    "probability (’[prediction]’) that [predicted_outcome]. The following SHAP table was "
    "generated to explain this outcome. It includes every feature along with its value for that "
    "instance, and the SHAP value assigned to it. The goal of SHAP is to explain the prediction of an "
    "instance by computing the contribution of each feature to the prediction. The SHAP explanation "
    "method computes Shapley values from coalitional game theory. The feature values of a data instance "
    "act as players in a coalition. Shapley values tell us how to fairly distribute the "
    "“payout” (= the prediction) among the features. A player can be an individual feature "
    "value, e.g. for tabular data. The scores in the table are sorted from most positive to most "
    "negative."
    "\n\n"
    "Can you come up with a plausible, fluent story as to why the model could have predicted this "
    "outcome, based on the most influential positive and most influential negative SHAP values? Focus "
    "on the features with the highest absolute value. Try to explain the most important feature values "
    "in this story, as well as potential interactions that fit the story. No need to enumerate "
    "individual features outside of the story. Conclude with a summary of why this classification "
    "might have occurred. Limit your answer to 8 sentences.";

constexpr std::string_view kCfBody =
    "In image classification, a counterfactual explanation is a part of the image that, when removed, "
    "results in a change in the predicted image class. A deep learning image classifier has "
    "misclassified the above image as a [original_class]. The counterfactual explanation is a [cf]: "
    "removing that part leads to the image being correctly classified as a [new_class]. Can you reason "
    "why the [cf] is responsible for the misclassification of the image as a [original_class]? Give an "
    "answer that provides some explanation why this kind of pattern of a [cf] being linked to a "
    "[original_class], might appear. Limit your answer to one sentence.";

constexpr std::string_view kLlmBody =
    "A deep learning image classifier has misclassified the above image as a [original_class]. Can you "
    "reason why this would have happened? Limit your answer to one sentence.";

using Values = std::map<std::string, std::string, std::less<>>;

// Single left-to-right pass; substituted values are never rescanned.
std::string substitute(std::string_view body, const Values& values) {
  std::string out;
  out.reserve(body.size() + 256);
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '[') {
      const std::size_t close = body.find(']', i);
      if (close != std::string_view::npos) {
        const std::string_view name = body.substr(i + 1, close - i - 1);
        auto it = values.find(name);
        if (it == values.end()) throw std::logic_error("template placeholder without value");
        out += it->second;
        i = close + 1;
        continue;
      }
    }
    out.push_back(body[i++]);
  }
  return out;
}

void require(const Values& values) {
  for (const auto& [name, value] : values) {
    if (value.empty()) throw MissingPlaceholderError(name);
  }
}

// "[Image Link]. <body>": the image reference leads the message.
std::string with_image_reference(const std::string& image_reference, const std::string& body) {
  const char last = image_reference.back();
  const bool terminated = last == '.' || last == '!' || last == '?';
  return image_reference + (terminated ? " " : ". ") + body;
}

}  // namespace

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::kShapStories: return "shapstories";
    case TemplateId::kCfStories: return "cfstories";
    case TemplateId::kLlmStories: return "llmstories";
  }
  return "unknown";
}

std::optional<TemplateId> parse_template_id(std::string_view text) {
  if (text == "shapstories") return TemplateId::kShapStories;
  if (text == "cfstories") return TemplateId::kCfStories;
  if (text == "llmstories") return TemplateId::kLlmStories;
  return std::nullopt;
}

std::string_view to_string(ShapWording wording) {
  return wording == ShapWording::kTemplate ? "template" : "running-example";
}

std::optional<ShapWording> parse_shap_wording(std::string_view text) {
  if (text == "template") return ShapWording::kTemplate;
  if (text == "running-example") return ShapWording::kRunningExample;
  return std::nullopt;
}

const PromptTemplate& shap_template(ShapWording wording) {
  static const PromptTemplate kTemplate{
      TemplateId::kShapStories,
      kShapTemplateBody,
      {"classification_task", "feature_description", "label_definition", "correctness", "percentage",
       "prediction", "predicted_outcome", "actual_outcome"}};
  static const PromptTemplate kRunningExample{
      TemplateId::kShapStories,
      kShapRunningExampleBody,
      {"classification_task", "feature_description", "label_definition", "correctness", "percentage",
       "prediction", "predicted_outcome"}};
  return wording == ShapWording::kTemplate ? kTemplate : kRunningExample;
}

const PromptTemplate& cf_template() {
  static const PromptTemplate kTemplate{TemplateId::kCfStories, kCfBody, {"original_class", "cf", "new_class"}};
  return kTemplate;
}

const PromptTemplate& llm_template() {
  static const PromptTemplate kTemplate{TemplateId::kLlmStories, kLlmBody, {"original_class"}};
  return kTemplate;
}

std::vector<std::string> placeholders_in(std::string_view body) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = body.find('[', i)) != std::string_view::npos) {
    const std::size_t close = body.find(']', i);
    if (close == std::string_view::npos) break;
    std::string name(body.substr(i + 1, close - i - 1));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    i = close + 1;
  }
  return out;
}

MissingPlaceholderError::MissingPlaceholderError(std::string placeholder)
    : InputError("missing value for placeholder [" + placeholder + "]"), placeholder_(std::move(placeholder)) {}

RenderedPrompt render_shapstories(const ShapStoryInputs& inputs) {
  if (inputs.percentage < 0 || inputs.percentage > 100) {
    throw std::invalid_argument("percentage must lie in 0..100");
  }
  Values values{
      {"classification_task", inputs.classification_task},
      {"feature_description", inputs.feature_description},
      {"label_definition", inputs.label_definition},
      {"correctness", inputs.correctness == Correctness::kCorrect ? "correctly classified" : "misclassified"},
      {"percentage", std::to_string(inputs.percentage)},
      {"prediction", inputs.prediction_text},
      {"predicted_outcome", inputs.predicted_outcome},
  };
  if (inputs.wording == ShapWording::kTemplate) values.emplace("actual_outcome", inputs.actual_outcome);
  require(values);
  if (inputs.shap_table_text.empty()) throw MissingPlaceholderError("shap_table");

  RenderedPrompt prompt;
  prompt.template_id = TemplateId::kShapStories;
  prompt.body = substitute(shap_template(inputs.wording).body, values);
  prompt.text = prompt.body + "\n\n" + inputs.shap_table_text;
  return prompt;
}

RenderedPrompt render_cfstories(const CfStoryInputs& inputs) {
  const Values values{{"original_class", inputs.original_class}, {"cf", inputs.cf_label}, {"new_class", inputs.new_class}};
  require(values);
  if (inputs.image_reference.empty()) throw MissingPlaceholderError("image_reference");
  if (inputs.original_class == inputs.new_class) {
    throw std::invalid_argument("original class and new class must differ ('" + inputs.new_class + "')");
  }
  RenderedPrompt prompt;
  prompt.template_id = TemplateId::kCfStories;
  prompt.body = substitute(cf_template().body, values);
  prompt.text = with_image_reference(inputs.image_reference, prompt.body);
  return prompt;
}

RenderedPrompt render_llmstories(const LlmStoryInputs& inputs) {
  const Values values{{"original_class", inputs.original_class}};
  require(values);
  if (inputs.image_reference.empty()) throw MissingPlaceholderError("image_reference");
  RenderedPrompt prompt;
  prompt.template_id = TemplateId::kLlmStories;
  prompt.body = substitute(llm_template().body, values);
  prompt.text = with_image_reference(inputs.image_reference, prompt.body);
  return prompt;
}

int score_to_percentage(double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw std::invalid_argument("score must lie in [0, 1]");
  return static_cast<int>(std::lround(score * 100.0));
}

}  // namespace xstory::narrative
