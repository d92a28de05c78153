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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "xstory/counterfactual.hpp"
#include "xstory/eval.hpp"
#include "xstory/llm_client.hpp"
#include "xstory/shap.hpp"
#include "xstory/templates.hpp"

namespace xstory::pipeline {

inline constexpr const char* kToolVersion = "xstory 0.3.0";

// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInputError = 2,
  kExitNotFound = 3,
  kExitEndpointFailure = 4,
};

// Context text for SHAP prompts that cannot be derived from the model.
struct StoryContext {
  std::string classification_task;
  std::string feature_description;
  std::string label_definition;
  std::string predicted_outcome;
  narrative::ShapWording wording = narrative::ShapWording::kTemplate;
};

struct RunConfig {
  std::string model_path;
  std::string dataset_path;
  std::string background_path;  // defaults to dataset_path
  std::string display_path;     // optional display sidecar
  std::string row = "0";        // index or "id:<value>"
  std::string template_id = "shapstories";
  bool baseline = false;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  std::size_t background_cap = 100;
  double threshold = 0.5;
  StoryContext story;
  narrative::LLMClientConfig llm;
  std::string cf_fixture;
  std::size_t cf_max_size = 5;
  std::size_t cf_call_budget = 10000;
  std::string records_path;
  std::string keywords_path;
};

// Reads a JSON config file. Unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& document, const std::string& source_name = "<config>");
// Canonical JSON snapshot stored in run manifests.
std::string config_to_json(const RunConfig& config);

struct ExplainShapOutputs {
  shap::ShapTable table;
  PredictionRecord prediction;
};

// Writes shap.csv, shap_table.txt, forceplot.svg and prediction.json.
ExplainShapOutputs run_explain_shap(const RunConfig& config);

// Runs sedc_search on the unit fixture (config.cf_fixture) or, without one, on
// the tabular instance with background-mean masking. Writes cf.json.
// NotFoundError propagates.
cf::CounterfactualResult run_explain_cf(const RunConfig& config);

struct NarrateOutputs {
  narrative::RenderedPrompt prompt;
  narrative::Narrative narrative;
  std::string manifest_json;
};

// Renders the selected template from earlier explain outputs in out_dir,
// generates the narrative and writes prompt.txt, narrative.txt and
// manifest.json.
NarrateOutputs run_narrate(const RunConfig& config);

// Reads records and keyword sets; writes report.csv and report.txt.
eval::SurveyReport run_evaluate(const RunConfig& config);

struct ManifestCheck {
  bool ok = true;
  std::map<std::string, std::string> mismatches;  // file -> reason
};

// Recomputes the prompt and narrative hashes recorded in out_dir/manifest.json.
ManifestCheck verify_manifest(const std::filesystem::path& out_dir);

// Maps an exception from any run_* function to an exit code.
int exit_code_for(const std::exception& error);

}  // namespace xstory::pipeline
