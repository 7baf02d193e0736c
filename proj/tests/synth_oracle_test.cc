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

#include <algorithm>
#include <cmath>
#include <random>

#include "girp/errors.h"
#include "girp/split_search.h"
#include "girp/synth.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "oracle/oracle.h"
#include "test_util.h"

namespace girp {
namespace {

using synth::GuardTerm;
using synth::PlantedRule;
using testing::AllRows;

TEST(Generate, NoRulesGivesZeroContributions) {
  const synth::SynthData data = synth::Generate({}, 50, 3, 1);
  for (std::size_t c = 0; c < 3; ++c) {
    for (double x : data.dataset.contributions.column(c)) EXPECT_EQ(x, 0.0);
  }
  for (double s : data.dataset.contributions.predicted_scores()) EXPECT_EQ(s, 0.0);
}

TEST(Generate, SingleRuleDefinition) {
  const PlantedRule rule{{GuardTerm{Split{0, LessThan{0.5}}, false}}, 1, 2.0, 0.0};
  const synth::SynthData data = synth::Generate({rule}, 300, 3, 2);
  const Dataset& d = data.dataset;
  for (std::size_t r = 0; r < 300; ++r) {
    const double v0 = d.features.value(r, 0);
    EXPECT_GE(v0, 0.0);
    EXPECT_LT(v0, 1.0);
    EXPECT_EQ(d.contributions.contribution(r, 1), v0 < 0.5 ? 2.0 : 0.0);
    EXPECT_EQ(d.contributions.contribution(r, 0), 0.0);
    EXPECT_EQ(d.contributions.predicted_score(r),
              d.contributions.contribution(r, 1));
  }
}

TEST(Generate, PureFunctionOfArguments) {
  const auto columns = synth::NestedFixtureColumns();
  const auto rules = synth::NestedFixtureRules(2.0, 0.4, 0.1);
  const synth::SynthData a = synth::Generate(columns, rules, 200, 5);
  const synth::SynthData b = synth::Generate(columns, rules, 200, 5);
  const synth::SynthData c = synth::Generate(columns, rules, 200, 6);
  EXPECT_EQ(a.dataset.features, b.dataset.features);
  EXPECT_EQ(a.dataset.contributions, b.dataset.contributions);
  EXPECT_NE(a.dataset.features, c.dataset.features);
}

TEST(Generate, FeatureKindsAndNoiseBookkeeping) {
  const auto columns = synth::NestedFixtureColumns();
  const synth::SynthData data = synth::Generate(
      columns, synth::NestedFixtureRules(2.0, 0.4, 0.3), 500, 7);
  const Dataset& d = data.dataset;
  for (std::size_t r = 0; r < 500; ++r) {
    const double v4 = d.features.value(r, 4);
    EXPECT_TRUE(v4 == 0.0 || v4 == 1.0);
    EXPECT_GE(d.features.code(r, 3), 0);
    EXPECT_LT(d.features.code(r, 3), 4);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      EXPECT_EQ(d.contributions.contribution(r, c),
                data.signal[c][r] + data.noise[c][r]);
    }
    const bool low = d.features.value(r, 2) < 0.5;
    EXPECT_EQ(data.signal[2][r], low ? 2.0 : 0.0);
    EXPECT_EQ(data.signal[4][r], !low && v4 == 1.0 ? 0.4 : 0.0);
    EXPECT_EQ(data.noise[0][r], 0.0);
  }
  const Dataset mirrored = synth::MirroredNoiseCopy(data);
  EXPECT_EQ(mirrored.features, d.features);
  for (std::size_t r = 0; r < 500; ++r) {
    EXPECT_EQ(mirrored.contributions.contribution(r, 2),
              data.signal[2][r] - data.noise[2][r]);
  }
}

TEST(Generate, RejectsBadRules) {
  const PlantedRule out_of_range{{}, 5, 1.0, 0.0};
  EXPECT_THROW(synth::Generate({out_of_range}, 10, 3, 1), DataError);
  const PlantedRule bad_guard{{GuardTerm{Split{7, LessThan{0.5}}, false}}, 0, 1.0, 0.0};
  EXPECT_THROW(synth::Generate({bad_guard}, 10, 3, 1), DataError);
  const PlantedRule wrong_kind{{GuardTerm{Split{0, IsOne{}}, false}}, 0, 1.0, 0.0};
  EXPECT_THROW(synth::Generate({wrong_kind}, 10, 3, 1), DataError);
  EXPECT_THROW(synth::Generate({}, 0, 3, 1), DataError);
}

TEST(SynthSpec, ParsesGuardsAndColumns) {
  std::vector<Column> columns;
  std::vector<PlantedRule> rules;
  synth::ParseSynthSpec(R"({
    "columns": [{"name": "age", "kind": "ordinal"},
                {"name": "smoker", "kind": "binary"},
                {"name": "region", "kind": "categorical", "levels": 3}],
    "rules": [{"guard": [{"var": 0, "op": "ge", "value": 0.7},
                         {"var": 2, "op": "in", "levels": [2, 0]}],
               "target": 0, "level": 1.5, "noise_sd": 0.1},
              {"guard": [{"var": 1, "op": "eq0"}], "target": 1, "level": -1}]
  })", columns, rules);
  ASSERT_EQ(columns.size(), 3u);
  EXPECT_EQ(columns[2].kind.levels, (std::vector<std::string>{"L0", "L1", "L2"}));
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_TRUE(rules[0].guard[0].negated);
  EXPECT_EQ(rules[0].guard[1].split.predicate, Predicate(InSubset{{0, 2}}));
  EXPECT_EQ(rules[0].noise_sd, 0.1);
  EXPECT_TRUE(rules[1].guard[0].Holds(0.0));
  EXPECT_FALSE(rules[1].guard[0].Holds(1.0));

  const auto truth = nlohmann::json::parse(
      synth::GroundTruthJson(columns, rules, 100, 9));
  EXPECT_EQ(truth["rules"].size(), 2u);
  EXPECT_EQ(truth["seed"], 9);

  EXPECT_THROW(synth::ParseSynthSpec(R"({"columns": [{"name": "a", "kind": "x"}]})",
                                     columns, rules),
               DataError);
  EXPECT_THROW(synth::ParseSynthSpec(R"({"columns": [{"name": "a", "kind": "ordinal"}],
      "rules": [{"guard": [{"var": 0, "op": "eq1"}], "target": 0, "level": 1}]})",
                                     columns, rules),
               DataError);
}

// The exact oracle and the production search agree on split identity and
// |G| on random mixed tables, with and without exact ties.
TEST(Oracle, AgreesWithBestSplitOnRandomSubsets) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    testing::RandomTableOptions options;
    options.rows = 2 + rng() % 199;
    options.columns = 1 + rng() % 10;
    options.ordinal_grid = trial % 3 == 0 ? 8 : 0;
    options.integer_contributions = trial % 2 == 0;
    options.max_levels = 2 + rng() % 11;
    const Dataset d = testing::RandomDataset(rng, options);
    const std::size_t size = 1 + rng() % options.rows;
    const auto subset = testing::RandomSubset(rng, options.rows, size);
    const std::size_t min_node = 1 + rng() % 5;
    const int max_exh = 1 + static_cast<int>(rng() % 8);
    const auto fast = BestSplit(subset, d.features, d.contributions,
                                {min_node, max_exh, 1});
    const auto exact = oracle::BestSplit(subset, d.features, d.contributions,
                                         min_node, max_exh);
    ASSERT_EQ(fast.has_value(), exact.has_value()) << "trial " << trial;
    if (!fast) continue;
    EXPECT_EQ(fast->split, exact->split) << "trial " << trial;
    const double g = std::fabs(exact->g.get_d());
    EXPECT_LE(std::fabs(std::fabs(fast->g_value) - g), 1e-9 * std::max(g, 1e-300))
        << "trial " << trial;
    EXPECT_EQ(fast->left_count, exact->left_count);
  }
}

TEST(Oracle, ConstantMatricesHaveNoSplit) {
  std::mt19937_64 rng(12);
  testing::RandomTableOptions options;
  options.rows = 80;
  options.columns = 6;
  const Dataset d = testing::RandomDataset(rng, options);
  const ContributionMatrix flat(
      std::vector<std::vector<double>>(6, std::vector<double>(80, 0.3)),
      std::vector<double>(80, 1.8));
  const auto rows = AllRows(80);
  EXPECT_FALSE(BestSplit(rows, d.features, flat, {}).has_value());
  EXPECT_FALSE(oracle::BestSplit(rows, d.features, flat, 1, 8).has_value());
}

TEST(Oracle, CategoricalExhaustiveFiveLevels) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(-1, 1);
  std::vector<double> values, contribs;
  for (int r = 0; r < 60; ++r) {
    values.push_back(static_cast<double>(r % 5));
    contribs.push_back(unit(rng));
  }
  const FeatureTable features(
      {{"c", FeatureKind::Categorical({"a", "b", "c", "d", "e"})}}, {values},
      [] {
        std::vector<std::string> ids;
        for (int r = 0; r < 60; ++r) ids.push_back(std::to_string(r));
        return ids;
      }());
  const ContributionMatrix contributions({contribs}, contribs);
  const auto rows = AllRows(60);
  const auto exact = oracle::AllSplits(rows, features, contributions, 1, 8);
  const auto fast = EnumerateSplits(0, rows, features, contributions, 8);
  ASSERT_EQ(exact.size(), 15u);
  ASSERT_EQ(fast.size(), 15u);
  for (const auto& e : exact) {
    const double g = SplitStrength(e.split, rows, features, contributions).g_value;
    EXPECT_NEAR(g, e.g.get_d(), 1e-12);
    EXPECT_NE(std::find(fast.begin(), fast.end(), e.split), fast.end());
  }
}

TEST(Oracle, SubtreeCounts) {
  EXPECT_EQ(oracle::AllSubtrees(testing::ChainTree({})).size(), 1u);
  EXPECT_EQ(oracle::AllSubtrees(testing::ChainTree({1.0, 2.0})).size(), 3u);
  // A root with two leafy internal children: {}, {r}, {r,a}, {r,b}, {r,a,b}.
  std::mt19937_64 rng(0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const InterpretationTree tree = testing::ShapeTree(rng, {1, 1, 1});
    if (tree.node(tree.root().left).split && tree.node(tree.root().right).split) {
      EXPECT_EQ(oracle::AllSubtrees(tree).size(), 5u);
      break;
    }
  }
  EXPECT_THROW(oracle::AllSubtrees(testing::ChainTree(std::vector<double>(13, 1.0))),
               oracle::TooLargeError);
  EXPECT_EQ(oracle::AllSubtrees(testing::ChainTree(std::vector<double>(12, 1.0))).size(),
            13u);
}

}  // namespace
}  // namespace girp
