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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xstory/error.hpp"

namespace xstory::narrative {

enum class TemplateId { kShapStories, kCfStories, kLlmStories };

std::string_view to_string(TemplateId id);
// Accepts "shapstories", "cfstories", "llmstories".
std::optional<TemplateId> parse_template_id(std::string_view text);

// Two wordings of the SHAP story prompt exist: the generic template, and the
// slightly different wording used for the student running example (no actual
// outcome sentence, "following SHAP table", "highest absolute value").
enum class ShapWording { kTemplate, kRunningExample };

std::string_view to_string(ShapWording wording);
std::optional<ShapWording> parse_shap_wording(std::string_view text);

// A prompt body with `[name]` placeholders.
struct PromptTemplate {
  TemplateId template_id;
  std::string_view body;
  std::vector<std::string_view> placeholders;  // declared input schema
};

const PromptTemplate& shap_template(ShapWording wording = ShapWording::kTemplate);
const PromptTemplate& cf_template();
const PromptTemplate& llm_template();

// Placeholder names that occur in `body`, in first-occurrence order.
std::vector<std::string> placeholders_in(std::string_view body);

enum class Correctness { kCorrect, kMisclassified };

struct ShapStoryInputs {
  std::string classification_task;
  std::string feature_description;
  std::string label_definition;
  Correctness correctness = Correctness::kCorrect;
  int percentage = 0;           // 0-100
  std::string prediction_text;  // "True" / "False"
  std::string predicted_outcome;
  std::string actual_outcome;  // "True" / "False"; unused by kRunningExample
  std::string shap_table_text;
  ShapWording wording = ShapWording::kTemplate;
};

struct CfStoryInputs {
  std::string image_reference;  // URL or prose description, passed verbatim
  std::string original_class;
  std::string cf_label;
  std::string new_class;
};

struct LlmStoryInputs {
  std::string image_reference;
  std::string original_class;
};

// `body` is the substituted template; `text` is the full user message: the
// body plus its attachment (SHAP table appended after a blank line, or the
// image reference prepended).
struct RenderedPrompt {
  TemplateId template_id = TemplateId::kShapStories;
  std::string body;
  std::string text;
};

class MissingPlaceholderError : public InputError {
 public:
  explicit MissingPlaceholderError(std::string placeholder);
  [[nodiscard]] const std::string& placeholder() const { return placeholder_; }

 private:
  std::string placeholder_;
};

RenderedPrompt render_shapstories(const ShapStoryInputs& inputs);
// Throws std::invalid_argument when original_class == new_class.
RenderedPrompt render_cfstories(const CfStoryInputs& inputs);
RenderedPrompt render_llmstories(const LlmStoryInputs& inputs);

// Whole percent for a probability score (0.444 -> 44).
int score_to_percentage(double score);

}  // namespace xstory::narrative
