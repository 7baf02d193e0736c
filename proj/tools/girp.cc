/*
 * Copyright 2026 The GIRP Authors.
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

// girp: build, explain, render and synth subcommands.
//
// Exit codes: 0 success, 2 invalid input, 3 internal invariant breach,
// 4 model endpoint failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "girp/data_model.h"
#include "girp/errors.h"
#include "girp/local_explainer.h"
#include "girp/pipeline.h"
#include "girp/render.h"
#include "girp/synth.h"
#include "json.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitEndpoint = 4;

struct BuildFlags {
  std::string features, contributions, schema, config;
  std::string out, report, sequence, dot;
  int max_depth = 100;
  std::size_t min_node = 20;
  int max_categorical_exhaustive = 8;
  double validation_fraction = 0.25;
  std::uint64_t seed = 42;
  int workers = 1;
  std::string positive_label;
};

// Config file values fill in options not given on the command line.
void ApplyConfig(const std::string& path, CLI::App& cmd, BuildFlags& flags) {
  if (path.empty()) return;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(girp::ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw girp::DataError(girp::DataError::Code::kParse,
                          "invalid config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) {
    throw girp::DataError(girp::DataError::Code::kParse,
                          "config must be a JSON object");
  }
  auto take = [&](const char* key, const char* flag, auto& target) {
    if (!doc.contains(key) || cmd.get_option(flag)->count() > 0) return;
    try {
      target = doc[key].get<std::decay_t<decltype(target)>>();
    } catch (const nlohmann::json::exception&) {
      throw girp::DataError(girp::DataError::Code::kParse,
                            std::string("bad config value for ") + key);
    }
  };
  take("max_depth", "--max-depth", flags.max_depth);
  take("min_node", "--min-node", flags.min_node);
  take("max_categorical_exhaustive", "--max-categorical-exhaustive",
       flags.max_categorical_exhaustive);
  take("validation_fraction", "--validation-fraction",
       flags.validation_fraction);
  take("seed", "--seed", flags.seed);
  take("workers", "--workers", flags.workers);
  take("positive_label", "--positive-label", flags.positive_label);
}

int RunBuild(CLI::App& cmd, BuildFlags& flags) {
  ApplyConfig(flags.config, cmd, flags);
  girp::GrowParams params;
  params.max_depth = flags.max_depth;
  params.min_node_size = flags.min_node;
  params.max_categorical_exhaustive = flags.max_categorical_exhaustive;
  params.validation_fraction = flags.validation_fraction;
  params.seed = flags.seed;
  params.workers = flags.workers;
  if (!flags.positive_label.empty()) params.positive_label = flags.positive_label;

  const girp::Dataset dataset =
      girp::LoadDataset(flags.features, flags.contributions, flags.schema);
  const girp::BuildResult result =
      girp::BuildInterpretationTree(dataset, params);

  girp::WriteFile(flags.out, girp::TreeToJson(result.chosen_tree, result.metadata));
  std::string report = flags.report;
  if (report.empty()) {
    report = (std::filesystem::path(flags.out).parent_path() / "report.json")
                 .string();
  }
  girp::WriteFile(report, girp::ReportToJson(result, params));
  if (!flags.sequence.empty()) {
    girp::WriteFile(flags.sequence, girp::SequenceToJson(result));
  }
  if (!flags.dot.empty()) {
    girp::WriteFile(flags.dot, girp::Render(result.chosen_tree,
                                            girp::RenderFormat::kDot,
                                            result.metadata));
  }
  std::cerr << "chosen tree k=" << result.selection.chosen_k << " of "
            << result.sequence.size() << ", " << result.chosen_tree.num_internal()
            << " splits, G_validation=" << result.selection.chosen_score()
            << "\n";
  return 0;
}

struct ExplainFlags {
  std::string features, schema, out;
  std::string model_cmd, model_addr;
  std::string policy = "loo";
  std::size_t samples = 0;
  double mask_probability = 0.5;
  double ridge = 1e-6;
  bool full_design = false;
  std::uint64_t seed = 42;
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
  int timeout_ms = 10000;
};

int RunExplain(const ExplainFlags& flags) {
  const auto schema = girp::ParseSchema(girp::ReadFile(flags.schema));
  const girp::FeatureTable features =
      girp::ParseFeatures(girp::ReadFile(flags.features), schema);

  girp::PerturbationPolicy policy;
  if (flags.policy == "loo") {
    policy.mode = girp::PerturbationPolicy::Mode::kLeaveOneOut;
  } else if (flags.policy == "mask") {
    policy.mode = girp::PerturbationPolicy::Mode::kMaskSampling;
  } else {
    throw girp::DataError(girp::DataError::Code::kInvalidArgument,
                          "unknown policy '" + flags.policy + "'");
  }
  policy.num_samples = flags.samples;
  policy.mask_probability = flags.mask_probability;
  policy.ridge = flags.ridge;
  policy.full_design = flags.full_design;
  policy.seed = flags.seed;

  girp::EndpointConfig config;
  if (!flags.model_addr.empty()) {
    config.transport = girp::EndpointConfig::Transport::kTcp;
    config.address = flags.model_addr;
  } else {
    config.command = flags.model_cmd;
  }
  config.timeout = std::chrono::milliseconds(flags.timeout_ms);
  config.batch_size = flags.batch_size;
  config.max_in_flight = flags.max_in_flight;

  girp::EndpointScorer scorer(config, features.columns());
  const girp::ContributionMatrix contributions =
      girp::BuildContributionMatrix(features, scorer, policy);
  girp::WriteFile(flags.out, girp::ContributionsToCsv(features, contributions));
  return 0;
}

struct RenderFlags {
  std::string tree, format = "ascii", out;
  int max_levels = -1;
};

int RunRender(const RenderFlags& flags) {
  girp::TreeMetadata metadata;
  const girp::InterpretationTree tree =
      girp::TreeFromJson(girp::ReadFile(flags.tree), &metadata);
  std::optional<int> max_levels;
  if (flags.max_levels >= 0) max_levels = flags.max_levels;
  const std::string text = girp::Render(
      tree, girp::ParseRenderFormat(flags.format), metadata, max_levels);
  if (flags.out.empty() || flags.out == "-") {
    std::cout << text;
  } else {
    girp::WriteFile(flags.out, text);
  }
  return 0;
}

struct SynthFlags {
  std::string spec, out_dir = ".", prefix = "synth";
  std::size_t rows = 1000;
  std::uint64_t seed = 42;
  double root_level = 2.0, child_level = 0.4, noise_sd = 0.0;
};

int RunSynth(const SynthFlags& flags) {
  std::vector<girp::Column> columns;
  std::vector<girp::synth::PlantedRule> rules;
  if (!flags.spec.empty()) {
    girp::synth::ParseSynthSpec(girp::ReadFile(flags.spec), columns, rules);
  } else {
    columns = girp::synth::NestedFixtureColumns();
    rules = girp::synth::NestedFixtureRules(flags.root_level, flags.child_level,
                                            flags.noise_sd);
  }
  const auto data =
      girp::synth::Generate(columns, rules, flags.rows, flags.seed);
  const std::filesystem::path dir(flags.out_dir);
  std::filesystem::create_directories(dir);
  const auto path = [&](const char* suffix) {
    return (dir / (flags.prefix + suffix)).string();
  };
  girp::WriteDataset(data.dataset, path("_features.csv"),
                     path("_contributions.csv"), path("_schema.json"));
  girp::WriteFile(path("_truth.json"),
                  girp::synth::GroundTruthJson(columns, rules, flags.rows,
                                               flags.seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global interpretation trees from per-sample contributions"};
  app.require_subcommand(1);

  BuildFlags build;
  CLI::App* build_cmd =
      app.add_subcommand("build", "Grow, prune and select an interpretation tree");
  build_cmd->add_option("--features", build.features, "Features CSV")->required();
  build_cmd->add_option("--contributions", build.contributions,
                        "Contributions CSV")->required();
  build_cmd->add_option("--schema", build.schema, "Schema JSON")->required();
  build_cmd->add_option("--out", build.out, "Chosen tree JSON")->required();
  build_cmd->add_option("--report", build.report,
                        "Selection report JSON (default: report.json next to --out)");
  build_cmd->add_option("--sequence", build.sequence, "Full prune sequence JSON");
  build_cmd->add_option("--dot", build.dot, "Chosen tree as Graphviz DOT");
  build_cmd->add_option("--config", build.config, "JSON config file");
  build_cmd->add_option("--max-depth", build.max_depth, "Maximum tree depth");
  build_cmd->add_option("--min-node", build.min_node, "Minimum samples per node");
  build_cmd->add_option("--max-categorical-exhaustive",
                        build.max_categorical_exhaustive,
                        "Exhaustive categorical split limit (levels)");
  build_cmd->add_option("--validation-fraction", build.validation_fraction,
                        "Held-out fraction");
  build_cmd->add_option("--seed", build.seed, "Partition seed");
  build_cmd->add_option("--workers", build.workers, "Split-search threads");
  build_cmd->add_option("--positive-label", build.positive_label,
                        "Label counted as correct for node accuracy");

  ExplainFlags explain;
  CLI::App* explain_cmd = app.add_subcommand(
      "explain", "Compute a contributions CSV by querying a model endpoint");
  explain_cmd->add_option("--features", explain.features, "Features CSV")->required();
  explain_cmd->add_option("--schema", explain.schema, "Schema JSON")->required();
  explain_cmd->add_option("--out", explain.out, "Contributions CSV")->required();
  auto* model_cmd = explain_cmd->add_option("--model-cmd", explain.model_cmd,
                                            "Model server command (stdio)");
  auto* model_addr = explain_cmd->add_option("--model-addr", explain.model_addr,
                                             "Model server host:port (TCP)");
  model_cmd->excludes(model_addr);
  explain_cmd->add_option("--policy", explain.policy, "loo | mask");
  explain_cmd->add_option("--samples", explain.samples, "Mask samples per row");
  explain_cmd->add_option("--mask-probability", explain.mask_probability,
                          "Chance a feature is masked");
  explain_cmd->add_option("--ridge", explain.ridge, "Ridge penalty");
  explain_cmd->add_flag("--full-design", explain.full_design,
                        "Use all 2^N masks");
  explain_cmd->add_option("--seed", explain.seed, "Mask sampling seed");
  explain_cmd->add_option("--batch-size", explain.batch_size, "Rows per request");
  explain_cmd->add_option("--max-in-flight", explain.max_in_flight,
                          "Outstanding requests");
  explain_cmd->add_option("--timeout-ms", explain.timeout_ms, "Request timeout");

  RenderFlags render;
  CLI::App* render_cmd = app.add_subcommand("render", "Render a tree JSON");
  render_cmd->add_option("--tree", render.tree, "Tree JSON")->required();
  render_cmd->add_option("--format", render.format, "ascii | dot | json");
  render_cmd->add_option("--max-levels", render.max_levels,
                         "Elide nodes deeper than this");
  render_cmd->add_option("--out", render.out, "Output file (default stdout)");

  SynthFlags synth;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "Write a synthetic dataset with planted contribution rules");
  synth_cmd->add_option("--spec", synth.spec,
                        "Columns and rules JSON (default: nested two-rule fixture)");
  synth_cmd->add_option("--rows", synth.rows, "Number of rows");
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory");
  synth_cmd->add_option("--prefix", synth.prefix, "Output file prefix");
  synth_cmd->add_option("--root-level", synth.root_level, "Fixture root rule level");
  synth_cmd->add_option("--child-level", synth.child_level,
                        "Fixture child rule level");
  synth_cmd->add_option("--noise-sd", synth.noise_sd, "Fixture noise sd");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*build_cmd) return RunBuild(*build_cmd, build);
    if (*explain_cmd) {
      if (explain.model_cmd.empty() && explain.model_addr.empty()) {
        std::cerr << "error: --model-cmd or --model-addr is required\n";
        return kExitInput;
      }
      return RunExplain(explain);
    }
    if (*render_cmd) return RunRender(render);
    if (*synth_cmd) return RunSynth(synth);
  } catch (const girp::EndpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEndpoint;
  } catch (const girp::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const girp::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitInput;
}
