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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "girp/data_model.h"
#include "girp/local_explainer.h"
#include "girp/pipeline.h"
#include "girp/pruner.h"
#include "girp/render.h"
#include "girp/selector.h"
#include "girp/split_search.h"
#include "girp/synth.h"
#include "oracle/oracle.h"
#include "test_util.h"

namespace girp {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer), format, a, b, c);
  return buffer;
}

// 1000 random subsets, M <= 200, N <= 10, mixed kinds.
Outcome OracleSplitAgreement() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260101);
  int agree = 0, with_split = 0;
  std::string first_miss;
  for (int trial = 0; trial < 1000; ++trial) {
    testing::RandomTableOptions options;
    options.rows = 2 + rng() % 199;
    options.columns = 1 + rng() % 10;
    options.ordinal_grid = trial % 3 == 0 ? 10 : 0;
    options.integer_contributions = trial % 4 == 0;
    options.max_levels = 2 + rng() % 11;
    const Dataset d = testing::RandomDataset(rng, options);
    const auto subset = testing::RandomSubset(rng, options.rows,
                                              1 + rng() % options.rows);
    const std::size_t min_node = 1 + rng() % 4;
    const auto fast = BestSplit(subset, d.features, d.contributions,
                                {min_node, 8, 1});
    const auto exact =
        oracle::BestSplit(subset, d.features, d.contributions, min_node, 8);
    bool ok = fast.has_value() == exact.has_value();
    if (ok && fast) {
      ++with_split;
      const double g = std::fabs(exact->g.get_d());
      ok = fast->split == exact->split &&
           std::fabs(std::fabs(fast->g_value) - g) <= 1e-9 * g;
    }
    if (ok) {
      ++agree;
    } else if (first_miss.empty()) {
      first_miss = " first mismatch at trial " + std::to_string(trial);
    }
  }
  const double elapsed = Seconds(start);
  return {agree == 1000 && elapsed < 60.0,
          Fmt("%.0f/1000 agree (%.0f with a split), %.2fs", agree, with_split,
              elapsed) +
              first_miss};
}

// A split reproduces a planted guard when it is on the guard variable and
// partitions the node's rows exactly as the guard does.
bool IsPlantedGuard(const TreeNode& node, const FeatureTable& features) {
  const Split& split = node.split->split;
  if (split.var_index == 2) {
    for (std::size_t r : node.sample_indices) {
      if (split.Satisfies(features.value(r, 2)) != (features.value(r, 2) < 0.5)) {
        return false;
      }
    }
    return true;
  }
  if (split.var_index == 4 && split.predicate == Predicate(IsOne{})) {
    for (std::size_t r : node.sample_indices) {
      if (features.value(r, 2) < 0.5) return false;
    }
    return true;
  }
  return false;
}

Outcome RuleRecovery() {
  const auto start = Clock::now();
  const auto columns = synth::NestedFixtureColumns();
  std::string detail;

  // Noise-free: the selected tree's root and one child are the guards.
  bool exact_ok = true;
  {
    const synth::SynthData data =
        synth::Generate(columns, synth::NestedFixtureRules(2.0, 0.4, 0.0), 2000, 7);
    GrowParams params;
    params.min_node_size = 20;
    params.seed = 7;
    const BuildResult result = BuildInterpretationTree(data.dataset, params);
    const InterpretationTree& tree = result.chosen_tree;
    const FeatureTable& build = data.dataset.features;
    exact_ok = !tree.root().is_leaf() && tree.root().split->split.var_index == 2 &&
               IsPlantedGuard(tree.root(), build);
    if (exact_ok) {
      const TreeNode& left = tree.node(tree.root().left);
      exact_ok = !left.is_leaf() && IsPlantedGuard(left, build) &&
                 left.split->split.var_index == 4 &&
                 tree.node(tree.root().right).is_leaf() && tree.num_internal() == 2;
    }
    detail += exact_ok ? "noise-free guards exact" : "noise-free guards NOT recovered";
  }

  // Noisy build data, validation = same features with mirrored noise: no
  // selected split may fall outside the planted guard set.
  int clean = 0;
  const double noise_sd = 0.05;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto rules = synth::NestedFixtureRules(2.0, 0.4, noise_sd);
    for (std::size_t c : {0u, 1u, 3u, 5u}) {
      rules.push_back(synth::PlantedRule{{}, c, 0.0, noise_sd});
    }
    const synth::SynthData data = synth::Generate(columns, rules, 2000, seed);
    const Dataset validation = synth::MirroredNoiseCopy(data);
    GrowParams params;
    params.min_node_size = 20;
    const BuildResult result =
        BuildInterpretationTree(data.dataset, validation, params);
    bool ok = result.chosen_tree.num_internal() == 2;
    for (const TreeNode& node : result.chosen_tree.nodes) {
      if (!node.is_leaf() && !IsPlantedGuard(node, data.dataset.features)) ok = false;
    }
    clean += ok;
  }
  const double elapsed = Seconds(start);
  detail += Fmt(", %.0f/20 noisy seeds select exactly the planted guards, %.2fs",
                clean, elapsed);
  return {exact_ok && clean == 20 && elapsed < 30.0, detail};
}

Outcome PruningCorrectness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(777);
  int trees = 0, good = 0, largest = 0;
  while (trees < 200) {
    testing::RandomTableOptions options;
    options.rows = 40 + rng() % 160;
    options.columns = 1 + rng() % 6;
    options.integer_contributions = trees % 3 == 0;
    const Dataset d = testing::RandomDataset(rng, options);
    GrowParams params;
    params.min_node_size = 3 + rng() % 10;
    params.max_depth = 2 + rng() % 4;
    const auto rows = testing::AllRows(options.rows);
    const InterpretationTree tree =
        GrowTree(d.features, d.contributions, rows, params);
    const int internal = static_cast<int>(tree.num_internal());
    if (internal < 1 || internal > 12) continue;
    ++trees;
    largest = std::max(largest, internal);

    const PruneSequence sequence = BuildPruneSequence(tree);
    bool ok = sequence.trees.front() == PrunedTree::Full(tree) &&
              sequence.trees.back() == PrunedTree::RootOnly(tree);
    for (std::size_t k = 0; ok && k + 1 < sequence.size(); ++k) {
      const auto& big = sequence.trees[k].internal;
      const auto& small = sequence.trees[k + 1].internal;
      bool strict = false;
      for (std::size_t i = 0; i < big.size(); ++i) {
        if (small[i] && !big[i]) ok = false;
        if (big[i] && !small[i]) strict = true;
      }
      ok = ok && strict;
      if (k > 0 && sequence.lambdas[k] < sequence.lambdas[k - 1]) ok = false;
    }
    const auto subtrees = oracle::AllSubtrees(tree);
    for (std::size_t k = 0; ok && k < sequence.size(); ++k) {
      const mpq_class lambda(sequence.lambda(k));
      const mpq_class mine =
          oracle::Penalized(tree, sequence.trees[k].internal, lambda);
      mpq_class best = mine;
      for (const auto& s : subtrees) {
        const mpq_class p = oracle::Penalized(tree, s, lambda);
        if (p > best) best = p;
      }
      const double gap = mpq_class(best - mine).get_d();
      if (gap > 1e-9 * std::max(1.0, std::fabs(best.get_d()))) ok = false;
    }
    good += ok;
  }
  const double elapsed = Seconds(start);
  return {good == 200 && elapsed < 120.0,
          Fmt("%.0f/200 trees nested, monotone and penalized-optimal "
              "(up to %.0f internal nodes), %.2fs",
              good, largest, elapsed)};
}

Outcome SelectionSanity() {
  std::mt19937_64 rng(99);
  int identity_ok = 0;
  for (int trial = 0; trial < 20; ++trial) {
    testing::RandomTableOptions options;
    options.rows = 300;
    options.columns = 5;
    const Dataset d = testing::RandomDataset(rng, options);
    GrowParams params;
    params.min_node_size = 5;
    params.max_depth = 6;
    const auto rows = testing::AllRows(options.rows);
    const InterpretationTree tree =
        GrowTree(d.features, d.contributions, rows, params);
    const PruneSequence sequence = BuildPruneSequence(tree);
    const SelectionReport report =
        SelectBest(tree, sequence, d.features, d.contributions);
    identity_ok += tree.num_internal() > 0 && report.chosen_k == 0 &&
                   report.chosen_score() == TotalStrength(tree);
  }

  int adversarial_ok = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const synth::SynthData data = synth::Generate(
        synth::NestedFixtureColumns(), synth::NestedFixtureRules(2.0, 0.4, 0.05),
        1000, seed);
    const Dataset validation = synth::MirroredNoiseCopy(data);
    GrowParams params;
    params.min_node_size = 20;
    const BuildResult result =
        BuildInterpretationTree(data.dataset, validation, params);
    // Exact argmax over the whole sequence, smaller tree on ties.
    std::vector<mpq_class> node(result.full_tree.num_nodes(), 0);
    for (const TreeNode& n : result.full_tree.nodes) {
      if (!n.is_leaf()) {
        node[n.node_id] = oracle::ValidationNodeStrength(
            result.full_tree, n.node_id, validation.features,
            validation.contributions);
      }
    }
    std::size_t best_k = result.sequence.size() - 1;
    mpq_class best = 0;
    for (std::size_t k = result.sequence.size(); k-- > 0;) {
      mpq_class score = 0;
      for (std::size_t i = 0; i < node.size(); ++i) {
        if (result.sequence.trees[k].internal[i]) score += node[i];
      }
      if (score > best) {
        best = score;
        best_k = k;
      }
    }
    adversarial_ok += result.selection.chosen_k == best_k &&
                      result.chosen_tree.num_internal() <
                          result.full_tree.num_internal();
  }
  return {identity_ok == 20 && adversarial_ok == 10,
          Fmt("validation=build picks T_0 with score = total strength in "
              "%.0f/20, adversarial picks a strictly smaller exact argmax in %.0f/10",
              identity_ok, adversarial_ok)};
}

double Term(double w, double x) { return w * (x * x + std::sin(x)); }

Outcome ExplainerExactness() {
  const std::vector<double> w = {1.0, -0.5, 2.5, 0.25, -1.75};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-3.0, 3.0);

  // Additive model, in process and through the fixture server.
  FunctionScorer local([&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += Term(w[i], x[i]);
    return s;
  });
  std::vector<Column> columns;
  std::vector<std::vector<double>> values(w.size(), std::vector<double>(200));
  std::vector<std::string> ids;
  for (std::size_t c = 0; c < w.size(); ++c) {
    columns.push_back({"x" + std::to_string(c), FeatureKind::Ordinal()});
    for (double& v : values[c]) v = unit(rng);
  }
  for (int r = 0; r < 200; ++r) ids.push_back(std::to_string(r));
  const FeatureTable table(columns, values, ids);
  const std::vector<double> baseline = ComputeBaseline(table);

  EndpointConfig config;
  config.command = std::string(GIRP_FIXTURE_SERVER_PATH) +
                   " --model additive --weights 1,-0.5,2.5,0.25,-1.75";
  EndpointScorer remote(config, columns);
  double loo_error = 0.0;
  for (Scorer* scorer : {static_cast<Scorer*>(&local), static_cast<Scorer*>(&remote)}) {
    const ContributionMatrix m = BuildContributionMatrix(table, *scorer, {});
    for (std::size_t r = 0; r < table.num_rows(); ++r) {
      for (std::size_t c = 0; c < w.size(); ++c) {
        const double expected =
            Term(w[c], table.value(r, c)) - Term(w[c], baseline[c]);
        loo_error = std::max(loo_error, std::fabs(m.contribution(r, c) - expected));
      }
    }
  }

  // Full 2^4 design, no ridge, linear model.
  const std::vector<double> lw = {0.75, -2.0, 1.5, 4.25};
  FunctionScorer linear([&](std::span<const double> x) {
    double s = 0.3;
    for (std::size_t i = 0; i < lw.size(); ++i) s += lw[i] * x[i];
    return s;
  });
  PerturbationPolicy policy;
  policy.mode = PerturbationPolicy::Mode::kMaskSampling;
  policy.ridge = 0.0;
  policy.full_design = true;
  const std::vector<double> ones(4, 1.0), zeros(4, 0.0);
  const Explanation e = ExplainSample(ones, linear, policy, zeros, 0);
  double mask_error = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    mask_error = std::max(mask_error, std::fabs(e.contributions[i] - lw[i]));
  }
  return {loo_error <= 1e-12 && mask_error <= 1e-9,
          Fmt("leave-one-out max error %.3g (tol 1e-12), full-design max "
              "error %.3g (tol 1e-9)",
              loo_error, mask_error)};
}

int System(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome Determinism() {
  const std::string cli = GIRP_CLI_PATH;
  const std::string data = GIRP_TEST_DATA_DIR;
  const std::string golden = GIRP_GOLDEN_DIR;
  testing::TempDir dir;
  int golden_ok = 0, runs = 0;
  for (int workers : {1, 1, 2, 4, 8}) {
    ++runs;
    const int code = System(
        cli + " build --features " + data + "/golden_features.csv --contributions " +
        data + "/golden_contributions.csv --schema " + data +
        "/golden_schema.json --min-node 30 --max-depth 4 --seed 3 --workers " +
        std::to_string(workers) + " --out " + dir.file("t.json") + " --dot " +
        dir.file("t.dot") + " 2>/dev/null");
    golden_ok += code == 0 && ReadFile(dir.file("t.json")) == ReadFile(golden + "/tree.json") &&
                 ReadFile(dir.file("t.dot")) == ReadFile(golden + "/tree.dot");
  }

  // A table large enough for split search to fan out across threads.
  const synth::SynthData big = synth::Generate(
      synth::NestedFixtureColumns(), synth::NestedFixtureRules(2.0, 0.4, 0.3),
      8000, 11);
  WriteDataset(big.dataset, dir.file("f.csv"), dir.file("c.csv"), dir.file("s.json"));
  std::string reference;
  int big_ok = 0, big_runs = 0;
  for (int workers : {1, 1, 4, 8}) {
    ++big_runs;
    const std::string prefix = dir.file("big" + std::to_string(big_runs));
    const int code = System(cli + " build --features " + dir.file("f.csv") +
                            " --contributions " + dir.file("c.csv") + " --schema " +
                            dir.file("s.json") + " --min-node 20 --workers " +
                            std::to_string(workers) + " --out " + prefix +
                            ".json --dot " + prefix + ".dot --report " + prefix +
                            "_report.json --sequence " + prefix + "_seq.json 2>/dev/null");
    const std::string all = ReadFile(prefix + ".json") + ReadFile(prefix + ".dot") +
                            ReadFile(prefix + "_report.json") +
                            ReadFile(prefix + "_seq.json");
    if (reference.empty()) reference = all;
    big_ok += code == 0 && all == reference;
  }
  return {golden_ok == runs && big_ok == big_runs,
          Fmt("golden JSON+DOT identical in %.0f/%.0f runs (workers 1,1,2,4,8); "
              "8000-row build identical in %.0f/4 runs (workers 1,1,4,8)",
              golden_ok, runs, big_ok)};
}

Outcome ConfigurationSmokeRuns() {
  auto rules = synth::NestedFixtureRules(2.0, 0.4, 0.2);
  for (std::size_t c : {0u, 1u, 3u, 5u}) {
    rules.push_back(synth::PlantedRule{{}, c, 0.0, 0.2});
  }
  const synth::SynthData data =
      synth::Generate(synth::NestedFixtureColumns(), rules, 5000, 2024);
  bool ok = true;
  std::string detail;
  for (std::size_t min_node : {20u, 50u, 100u}) {
    GrowParams params;
    params.max_depth = 100;
    params.min_node_size = min_node;
    const auto start = Clock::now();
    const BuildResult result = BuildInterpretationTree(data.dataset, params);
    const double elapsed = Seconds(start);
    ok = ok && elapsed < 60.0;
    detail += Fmt("(100/%.0f): %.2fs, ", static_cast<double>(min_node), elapsed);
    detail += std::to_string(result.full_tree.num_internal()) + " -> " +
              std::to_string(result.chosen_tree.num_internal()) + " splits";
    if (min_node != 100u) detail += "; ";
  }
  return {ok, detail};
}

}  // namespace
}  // namespace girp

int main() {
  struct Criterion {
    const char* name;
    std::function<girp::Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"oracle-split-agreement", girp::OracleSplitAgreement},
      {"rule-recovery", girp::RuleRecovery},
      {"pruning-correctness", girp::PruningCorrectness},
      {"selection-sanity", girp::SelectionSanity},
      {"explainer-exactness", girp::ExplainerExactness},
      {"determinism", girp::Determinism},
      {"configuration-smoke-runs", girp::ConfigurationSmokeRuns},
  };
  int failures = 0;
  for (const Criterion& criterion : criteria) {
    girp::Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("%s  %-24s %s\n", outcome.pass ? "PASS" : "FAIL", criterion.name,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
