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

// xstory: explain a prediction, turn the explanation into a narrative, and
// score survey responses.
//
//   xstory explain-shap --model m.json --data d.csv --row 3 --out run/
//   xstory explain-cf   --fixture lighthouse.json --out run/
//   xstory narrate      --template cfstories --endpoint mock: --out run/
//   xstory evaluate     --records r.csv --keywords k.json --out run/

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "xstory/pipeline.hpp"

namespace {

using xstory::pipeline::RunConfig;

struct Flags {
  std::string config;
  std::optional<std::string> model;
  std::optional<std::string> data;
  std::optional<std::string> background;
  std::optional<std::string> display;
  std::optional<std::string> row;
  std::optional<std::string> template_id;
  bool baseline = false;
  std::optional<std::string> endpoint;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> fixture;
  std::optional<std::string> records;
  std::optional<std::string> keywords;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration; flags override it");
  cmd->add_option("--out", f.out, "Output directory (default: out)");
  cmd->add_option("--seed", f.seed, "Seed for background sampling (default: 0)");
}

void add_instance(CLI::App* cmd, Flags& f) {
  cmd->add_option("--model", f.model, "Tree-ensemble JSON");
  cmd->add_option("--data", f.data, "Dataset CSV holding the instance");
  cmd->add_option("--background", f.background, "Background CSV (default: the dataset)");
  cmd->add_option("--display", f.display, "Display-value sidecar CSV");
  cmd->add_option("--row", f.row, "Row index or id:<value> (default: 0)");
}

RunConfig resolve_config(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : xstory::pipeline::load_config(f.config);
  if (f.model) c.model_path = *f.model;
  if (f.data) c.dataset_path = *f.data;
  if (f.background) c.background_path = *f.background;
  if (f.display) c.display_path = *f.display;
  if (f.row) c.row = *f.row;
  if (f.template_id) c.template_id = *f.template_id;
  if (f.baseline) c.baseline = true;
  if (f.endpoint) c.llm.base_url = *f.endpoint;
  if (f.out) c.out_dir = *f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.fixture) c.cf_fixture = *f.fixture;
  if (f.records) c.records_path = *f.records;
  if (f.keywords) c.keywords_path = *f.keywords;
  return c;
}

int run(const std::string& command, const Flags& flags) {
  namespace p = xstory::pipeline;
  const RunConfig config = resolve_config(flags);
  if (command == "explain-shap") {
    const auto out = p::run_explain_shap(config);
    std::cout << xstory::shap::render_table_text(out.table);
    std::cout << "score " << out.prediction.score << " -> " << out.prediction.predicted_label << "\n";
  } else if (command == "explain-cf") {
    const auto result = p::run_explain_cf(config);
    std::cout << result.original_class << " -> " << result.new_class << " after removing";
    for (const auto& label : result.cf_labels) std::cout << " [" << label << "]";
    std::cout << " (" << result.predictor_calls << " predictor calls)\n";
  } else if (command == "narrate") {
    const auto out = p::run_narrate(config);
    std::cout << out.narrative.text << "\n";
  } else if (command == "evaluate") {
    std::cout << xstory::eval::report_to_text(p::run_evaluate(config));
  } else if (command == "verify") {
    const auto check = p::verify_manifest(config.out_dir);
    for (const auto& [file, reason] : check.mismatches) std::cerr << file << ": " << reason << "\n";
    std::cout << (check.ok ? "manifest ok" : "manifest mismatch") << "\n";
    return check.ok ? p::kExitOk : p::kExitInputError;
  }
  std::cerr << "wrote outputs under " << config.out_dir.string() << "\n";
  return p::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explanations as narratives for tree ensembles and image counterfactuals"};
  app.set_version_flag("--version", xstory::pipeline::kToolVersion);
  app.require_subcommand(1);

  Flags flags;
  auto* shap = app.add_subcommand("explain-shap", "Interventional TreeSHAP table and force plot");
  add_common(shap, flags);
  add_instance(shap, flags);

  auto* cf = app.add_subcommand("explain-cf", "Greedy evidence-removal counterfactual");
  add_common(cf, flags);
  add_instance(cf, flags);
  cf->add_option("--fixture", flags.fixture, "Unit fixture JSON (image-style counterfactual)");

  auto* narrate = app.add_subcommand("narrate", "Render a prompt from earlier outputs and query the LLM");
  add_common(narrate, flags);
  narrate->add_option("--template", flags.template_id, "shapstories | cfstories | llmstories");
  narrate->add_flag("--baseline", flags.baseline, "Use the prompt without the counterfactual");
  narrate->add_option("--endpoint", flags.endpoint, "Chat-completions base URL or mock:");

  auto* evaluate = app.add_subcommand("evaluate", "Aggregate survey responses");
  add_common(evaluate, flags);
  evaluate->add_option("--records", flags.records, "Survey responses CSV");
  evaluate->add_option("--keywords", flags.keywords, "Accepted keyword sets JSON");

  auto* verify = app.add_subcommand("verify", "Recompute the hashes recorded in manifest.json");
  add_common(verify, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : xstory::pipeline::kExitInputError;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return xstory::pipeline::exit_code_for(e);
  }
}
