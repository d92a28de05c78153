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

#include "xstory/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "xstory/dataset.hpp"
#include "xstory/error.hpp"
#include "xstory/force_plot.hpp"
#include "xstory/hashing.hpp"
#include "xstory/sentences.hpp"
#include "xstory/survey_io.hpp"
#include "xstory/unit_fixture.hpp"

namespace xstory::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kShapCsv = "shap.csv";
constexpr const char* kShapText = "shap_table.txt";
constexpr const char* kForcePlot = "forceplot.svg";
constexpr const char* kPredictionJson = "prediction.json";
constexpr const char* kCfJson = "cf.json";
constexpr const char* kPromptTxt = "prompt.txt";
constexpr const char* kNarrativeTxt = "narrative.txt";
constexpr const char* kManifestJson = "manifest.json";
constexpr const char* kReportCsv = "report.csv";
constexpr const char* kReportTxt = "report.txt";

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": cannot create output directory: " + ec.message());
}

void require_path(const std::string& value, const char* what) {
  if (value.empty()) throw InputError(std::string("missing ") + what + " path");
  if (!fs::exists(value)) throw InputError(value + ": " + what + " file does not exist");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - since)
      .count();
}

// Resolves a config-relative path against the directory of the config file.
std::string resolve(const std::string& value, const fs::path& base) {
  if (value.empty() || base.empty() || fs::path(value).is_absolute()) return value;
  return (base / value).lexically_normal().string();
}

template <typename T>
void take(const json& obj, const char* key, T& target, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    target = it->template get<T>();
  } catch (const json::exception&) {
    throw InputError(where + ": key '" + key + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (std::string_view k : known) found = found || k == key;
    if (!found) throw InputError(where + ": unknown key '" + key + "'");
  }
}

struct LoadedInstance {
  TreeEnsemble ensemble;
  Dataset dataset;
  std::size_t row = 0;
};

LoadedInstance load_instance(const RunConfig& config) {
  require_path(config.model_path, "model");
  require_path(config.dataset_path, "dataset");
  TreeEnsemble ensemble = load_ensemble_file(config.model_path);
  Dataset dataset = read_dataset(config.dataset_path, &ensemble.feature_names());
  if (!config.display_path.empty()) {
    require_path(config.display_path, "display");
    attach_display_values(dataset, config.display_path);
  }
  const std::size_t row = select_row(dataset, config.row);
  return {std::move(ensemble), std::move(dataset), row};
}

BackgroundSet load_background(const RunConfig& config, const LoadedInstance& loaded) {
  if (config.background_path.empty() || config.background_path == config.dataset_path) {
    return sample_background(loaded.dataset, config.background_cap, config.seed);
  }
  require_path(config.background_path, "background");
  const Dataset background = read_dataset(config.background_path, &loaded.ensemble.feature_names());
  return sample_background(background, config.background_cap, config.seed);
}

json prediction_to_json(const PredictionRecord& p, const ClassLabels& labels) {
  json out;
  out["score"] = p.score;
  out["threshold"] = p.threshold;
  out["predicted_label"] = p.predicted_label;
  out["actual_label"] = p.actual_label ? json(*p.actual_label) : json(nullptr);
  out["correct"] = p.correct ? json(*p.correct) : json(nullptr);
  out["positive_label"] = labels.positive;
  out["negative_label"] = labels.negative;
  return out;
}

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += i + 1 == labels.size() ? " and " : ", ";
    out += labels[i];
  }
  return out;
}

narrative::RenderedPrompt render_from_outputs(const RunConfig& config, narrative::TemplateId id,
                                              std::string& input_file) {
  using narrative::TemplateId;
  if (id == TemplateId::kShapStories) {
    input_file = kShapCsv;
    const shap::ShapTable table =
        shap::from_csv(read_text(config.out_dir / kShapCsv), (config.out_dir / kShapCsv).string());
    json prediction;
    const fs::path prediction_path = config.out_dir / kPredictionJson;
    try {
      prediction = json::parse(read_text(prediction_path));
    } catch (const json::exception& e) {
      throw InputError(prediction_path.string() + ": " + e.what());
    }
    narrative::ShapStoryInputs in;
    in.classification_task = config.story.classification_task;
    in.feature_description = config.story.feature_description;
    in.label_definition = config.story.label_definition;
    in.predicted_outcome = config.story.predicted_outcome;
    in.wording = config.story.wording;
    try {
      const std::string positive = prediction.at("positive_label").get<std::string>();
      const json& correct = prediction.at("correct");
      in.correctness = correct.is_boolean() && !correct.get<bool>() ? narrative::Correctness::kMisclassified
                                                                    : narrative::Correctness::kCorrect;
      in.percentage = narrative::score_to_percentage(prediction.at("score").get<double>());
      in.prediction_text = prediction.at("predicted_label").get<std::string>() == positive ? "True" : "False";
      const json& actual = prediction.at("actual_label");
      if (actual.is_string()) in.actual_outcome = actual.get<std::string>() == positive ? "True" : "False";
    } catch (const json::exception& e) {
      throw InputError(prediction_path.string() + ": " + e.what());
    }
    in.shap_table_text = shap::render_table_text(table);
    return narrative::render_shapstories(in);
  }

  input_file = kCfJson;
  const cf::StoredCounterfactual stored = [&] {
    try {
      return cf::result_from_json(read_text(config.out_dir / kCfJson));
    } catch (const std::exception& e) {
      if (dynamic_cast<const InputError*>(&e)) throw;
      throw InputError((config.out_dir / kCfJson).string() + ": " + e.what());
    }
  }();
  if (id == TemplateId::kCfStories) {
    return narrative::render_cfstories({stored.image_reference, stored.result.original_class,
                                        join_labels(stored.result.cf_labels), stored.result.new_class});
  }
  return narrative::render_llmstories({stored.image_reference, stored.result.original_class});
}

std::size_t sentence_limit(narrative::TemplateId id) {
  return id == narrative::TemplateId::kShapStories ? 8 : 1;
}

std::string_view template_body(narrative::TemplateId id, narrative::ShapWording wording) {
  switch (id) {
    case narrative::TemplateId::kShapStories: return narrative::shap_template(wording).body;
    case narrative::TemplateId::kCfStories: return narrative::cf_template().body;
    case narrative::TemplateId::kLlmStories: return narrative::llm_template().body;
  }
  return {};
}

}  // namespace

RunConfig parse_config(const std::string& document, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InputError(source_name + ": not valid JSON: " + e.what());
  }
  reject_unknown(doc,
                 {"model", "data", "background", "display", "row", "template", "baseline", "out", "seed",
                  "background_cap", "threshold", "story", "llm", "counterfactual", "evaluate"},
                 source_name);
  RunConfig c;
  take(doc, "model", c.model_path, source_name);
  take(doc, "data", c.dataset_path, source_name);
  take(doc, "background", c.background_path, source_name);
  take(doc, "display", c.display_path, source_name);
  take(doc, "row", c.row, source_name);
  take(doc, "template", c.template_id, source_name);
  take(doc, "baseline", c.baseline, source_name);
  std::string out = c.out_dir.string();
  take(doc, "out", out, source_name);
  c.out_dir = out;
  take(doc, "seed", c.seed, source_name);
  take(doc, "background_cap", c.background_cap, source_name);
  take(doc, "threshold", c.threshold, source_name);

  if (auto it = doc.find("story"); it != doc.end()) {
    const std::string where = source_name + ": story";
    reject_unknown(*it,
                   {"classification_task", "feature_description", "label_definition", "predicted_outcome",
                    "wording"},
                   where);
    take(*it, "classification_task", c.story.classification_task, where);
    take(*it, "feature_description", c.story.feature_description, where);
    take(*it, "label_definition", c.story.label_definition, where);
    take(*it, "predicted_outcome", c.story.predicted_outcome, where);
    std::string wording(narrative::to_string(c.story.wording));
    take(*it, "wording", wording, where);
    const auto parsed = narrative::parse_shap_wording(wording);
    if (!parsed) throw InputError(where + ": unknown wording '" + wording + "'");
    c.story.wording = *parsed;
  }
  if (auto it = doc.find("llm"); it != doc.end()) {
    const std::string where = source_name + ": llm";
    reject_unknown(*it,
                   {"endpoint", "model", "temperature", "max_tokens", "timeout_ms", "max_retries",
                    "api_key_env", "backoff_initial_ms", "max_concurrency"},
                   where);
    take(*it, "endpoint", c.llm.base_url, where);
    take(*it, "model", c.llm.model_name, where);
    take(*it, "temperature", c.llm.temperature, where);
    take(*it, "max_tokens", c.llm.max_tokens, where);
    take(*it, "timeout_ms", c.llm.timeout_ms, where);
    take(*it, "max_retries", c.llm.max_retries, where);
    take(*it, "api_key_env", c.llm.api_key_env, where);
    take(*it, "backoff_initial_ms", c.llm.backoff_initial_ms, where);
    take(*it, "max_concurrency", c.llm.max_concurrency, where);
  }
  if (auto it = doc.find("counterfactual"); it != doc.end()) {
    const std::string where = source_name + ": counterfactual";
    reject_unknown(*it, {"fixture", "max_size", "call_budget"}, where);
    take(*it, "fixture", c.cf_fixture, where);
    take(*it, "max_size", c.cf_max_size, where);
    take(*it, "call_budget", c.cf_call_budget, where);
  }
  if (auto it = doc.find("evaluate"); it != doc.end()) {
    const std::string where = source_name + ": evaluate";
    reject_unknown(*it, {"records", "keywords"}, where);
    take(*it, "records", c.records_path, where);
    take(*it, "keywords", c.keywords_path, where);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  RunConfig c = parse_config(read_text(path), path);
  const fs::path base = fs::path(path).parent_path();
  for (std::string* p : {&c.model_path, &c.dataset_path, &c.background_path, &c.display_path, &c.cf_fixture,
                         &c.records_path, &c.keywords_path}) {
    *p = resolve(*p, base);
  }
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json doc;
  doc["model"] = c.model_path;
  doc["data"] = c.dataset_path;
  doc["background"] = c.background_path;
  doc["display"] = c.display_path;
  doc["row"] = c.row;
  doc["template"] = c.template_id;
  doc["baseline"] = c.baseline;
  doc["out"] = c.out_dir.string();
  doc["seed"] = c.seed;
  doc["background_cap"] = c.background_cap;
  doc["threshold"] = c.threshold;
  doc["story"] = {{"classification_task", c.story.classification_task},
                  {"feature_description", c.story.feature_description},
                  {"label_definition", c.story.label_definition},
                  {"predicted_outcome", c.story.predicted_outcome},
                  {"wording", std::string(narrative::to_string(c.story.wording))}};
  doc["llm"] = {{"endpoint", c.llm.base_url},
                {"model", c.llm.model_name},
                {"temperature", c.llm.temperature},
                {"max_tokens", c.llm.max_tokens},
                {"timeout_ms", c.llm.timeout_ms},
                {"max_retries", c.llm.max_retries},
                {"api_key_env", c.llm.api_key_env},
                {"backoff_initial_ms", c.llm.backoff_initial_ms},
                {"max_concurrency", c.llm.max_concurrency}};
  doc["counterfactual"] = {
      {"fixture", c.cf_fixture}, {"max_size", c.cf_max_size}, {"call_budget", c.cf_call_budget}};
  doc["evaluate"] = {{"records", c.records_path}, {"keywords", c.keywords_path}};
  return doc.dump(2);
}

ExplainShapOutputs run_explain_shap(const RunConfig& config) {
  const LoadedInstance loaded = load_instance(config);
  const BackgroundSet background = load_background(config, loaded);
  const TabularInstance& instance = loaded.dataset.rows[loaded.row];

  ExplainShapOutputs out;
  out.table = shap::tree_shap(loaded.ensemble, instance, background);
  out.prediction = make_prediction_record(out.table.score, config.threshold,
                                          loaded.ensemble.class_labels(), loaded.dataset.labels[loaded.row]);

  ensure_out_dir(config.out_dir);
  write_text(config.out_dir / kShapCsv, shap::to_csv(out.table));
  write_text(config.out_dir / kShapText, shap::render_table_text(out.table));
  write_text(config.out_dir / kForcePlot, shap::render_force_plot_svg(shap::layout_force_plot(out.table)));
  json prediction = prediction_to_json(out.prediction, loaded.ensemble.class_labels());
  prediction["row"] = loaded.row;
  const auto& id = loaded.dataset.ids[loaded.row];
  prediction["id"] = id ? json(*id) : json(nullptr);
  write_text(config.out_dir / kPredictionJson, prediction.dump(2) + "\n");
  return out;
}

cf::CounterfactualResult run_explain_cf(const RunConfig& config) {
  cf::CounterfactualResult result;
  std::string image_reference;
  if (!config.cf_fixture.empty()) {
    require_path(config.cf_fixture, "counterfactual fixture");
    const cf::UnitFixture fixture = cf::UnitFixture::load_file(config.cf_fixture);
    result = cf::sedc_search(fixture.predictor(), fixture.instance(), config.cf_max_size, config.cf_call_budget);
    image_reference = fixture.image_reference();
  } else {
    const LoadedInstance loaded = load_instance(config);
    const BackgroundSet background = load_background(config, loaded);
    const auto& names = loaded.ensemble.feature_names();
    const cf::TabularMasking masking =
        cf::make_tabular_masking(loaded.ensemble, to_feature_vector(names, loaded.dataset.rows[loaded.row]),
                                 background_means(names, background), config.threshold);
    result = cf::sedc_search(masking.predictor, masking.instance, config.cf_max_size, config.cf_call_budget);
    const auto& id = loaded.dataset.ids[loaded.row];
    image_reference = id ? "instance " + *id : "row " + std::to_string(loaded.row);
  }
  ensure_out_dir(config.out_dir);
  write_text(config.out_dir / kCfJson, cf::result_to_json(result, image_reference));
  return result;
}

NarrateOutputs run_narrate(const RunConfig& config) {
  auto id = narrative::parse_template_id(config.template_id);
  if (!id) throw InputError("unknown template '" + config.template_id + "'");
  if (config.baseline) {
    if (*id == narrative::TemplateId::kShapStories) {
      throw InputError("--baseline applies to cfstories only");
    }
    id = narrative::TemplateId::kLlmStories;
  }
  try {
    config.llm.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("llm config: ") + e.what());
  }

  const auto render_start = std::chrono::steady_clock::now();
  std::string input_file;
  NarrateOutputs out;
  out.prompt = render_from_outputs(config, *id, input_file);
  const std::int64_t render_ms = elapsed_ms(render_start);

  out.narrative = narrative::generate_narrative(out.prompt, config.llm);
  const narrative::LimitCheck limit = narrative::enforce_limit(out.narrative.text, sentence_limit(*id));

  ensure_out_dir(config.out_dir);
  write_text(config.out_dir / kPromptTxt, out.prompt.text);
  write_text(config.out_dir / kNarrativeTxt, out.narrative.text);

  json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["created_at"] = utc_timestamp();
  manifest["template_id"] = std::string(narrative::to_string(*id));
  manifest["template_hash"] = sha256_hex(template_body(*id, config.story.wording));
  manifest["input_file"] = input_file;
  manifest["input_hash"] = sha256_hex(read_text(config.out_dir / input_file));
  manifest["prompt_file"] = kPromptTxt;
  manifest["prompt_hash"] = sha256_hex(out.prompt.text);
  manifest["narrative_file"] = kNarrativeTxt;
  manifest["narrative_hash"] = sha256_hex(out.narrative.text);
  manifest["narrative"] = {{"model_id", out.narrative.model_id},
                           {"attempts", out.narrative.attempts},
                           {"sentence_count", out.narrative.sentence_count},
                           {"sentence_limit", sentence_limit(*id)},
                           {"compliant", limit.compliant},
                           {"empty", limit.empty},
                           {"warning", limit.warning}};
  manifest["timings_ms"] = {{"render", render_ms}, {"generate", out.narrative.elapsed_ms}};
  manifest["config"] = json::parse(config_to_json(config));
  out.manifest_json = manifest.dump(2) + "\n";
  write_text(config.out_dir / kManifestJson, out.manifest_json);
  return out;
}

eval::SurveyReport run_evaluate(const RunConfig& config) {
  require_path(config.records_path, "records");
  require_path(config.keywords_path, "keywords");
  const auto keywords = eval::read_keyword_sets(config.keywords_path);
  const auto records = eval::read_records(config.records_path);
  eval::SurveyReport report = eval::aggregate_survey(records, keywords);
  ensure_out_dir(config.out_dir);
  write_text(config.out_dir / kReportCsv, eval::report_to_csv(report));
  write_text(config.out_dir / kReportTxt, eval::report_to_text(report));
  return report;
}

ManifestCheck verify_manifest(const fs::path& out_dir) {
  ManifestCheck check;
  json manifest;
  try {
    manifest = json::parse(read_text(out_dir / kManifestJson));
  } catch (const json::exception& e) {
    throw InputError((out_dir / kManifestJson).string() + ": " + e.what());
  }
  auto compare = [&](const char* file_key, const char* hash_key) {
    const std::string file = manifest.value(file_key, std::string());
    const std::string stored = manifest.value(hash_key, std::string());
    if (file.empty() || stored.empty()) {
      check.mismatches[file_key] = std::string("manifest lacks ") + file_key + " or " + hash_key;
      return;
    }
    std::string actual;
    try {
      actual = sha256_hex(read_text(out_dir / file));
    } catch (const InputError&) {
      check.mismatches[file] = "file missing";
      return;
    }
    if (actual != stored) check.mismatches[file] = "hash " + actual + " != recorded " + stored;
  };
  compare("prompt_file", "prompt_hash");
  compare("narrative_file", "narrative_hash");
  compare("input_file", "input_hash");

  const auto id = narrative::parse_template_id(manifest.value("template_id", std::string()));
  if (!id) {
    check.mismatches["template"] = "unknown template id";
  } else {
    auto wording = narrative::ShapWording::kTemplate;
    if (manifest.contains("config")) {
      const auto w = narrative::parse_shap_wording(
          manifest["config"].value("story", json::object()).value("wording", std::string("template")));
      if (w) wording = *w;
    }
    if (sha256_hex(template_body(*id, wording)) != manifest.value("template_hash", std::string())) {
      check.mismatches["template"] = "template body changed since the run";
    }
  }
  check.ok = check.mismatches.empty();
  return check;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const cf::NotFoundError*>(&error)) return kExitNotFound;
  if (dynamic_cast<const narrative::EndpointError*>(&error)) return kExitEndpointFailure;
  if (dynamic_cast<const InputError*>(&error)) return kExitInputError;
  if (dynamic_cast<const nlohmann::json::exception*>(&error)) return kExitInputError;
  return kExitInternal;
}

}  // namespace xstory::pipeline
