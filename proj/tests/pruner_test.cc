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

#include "girp/pruner.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oracle/oracle.h"
#include "test_util.h"

namespace girp {
namespace {

using testing::ChainTree;
using testing::ShapeTree;

std::vector<double> RandomG(std::mt19937_64& rng, int n, bool integers) {
  std::vector<double> g(n);
  std::uniform_real_distribution<double> unit(-3.0, 3.0);
  for (double& x : g) {
    x = integers ? static_cast<double>(static_cast<int>(rng() % 7) - 3) + 0.5
                 : unit(rng);
  }
  return g;
}

bool IsStrictSubset(const PrunedTree& small, const PrunedTree& big) {
  bool strictly = false;
  for (std::size_t i = 0; i < big.internal.size(); ++i) {
    if (small.internal[i] && !big.internal[i]) return false;
    if (big.internal[i] && !small.internal[i]) strictly = true;
  }
  return strictly;
}

bool ClosedUpward(const InterpretationTree& tree, const PrunedTree& pruned) {
  for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
    const int parent = tree.nodes[i].parent;
    if (pruned.internal[i] && parent >= 0 && !pruned.internal[parent]) {
      return false;
    }
  }
  return true;
}

TEST(TotalStrength, Examples) {
  const InterpretationTree leaf = ChainTree({});
  EXPECT_EQ(TotalStrength(leaf), 0.0);
  EXPECT_EQ(PenalizedStrength(leaf, PrunedTree::Full(leaf), 5.0), 0.0);

  const InterpretationTree two = ChainTree({2.0, -1.5});
  EXPECT_EQ(TotalStrength(two), 3.5);
  EXPECT_EQ(PenalizedStrength(two, PrunedTree::Full(two), 1.0), 1.5);
}

TEST(TotalStrength, MatchesOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const InterpretationTree tree = ShapeTree(rng, RandomG(rng, rng() % 12, false));
    const PrunedTree full = PrunedTree::Full(tree);
    EXPECT_NEAR(TotalStrength(tree),
                oracle::TotalStrength(tree, full.internal).get_d(), 1e-12);
  }
}

TEST(AvgSubtreeStrength, Examples) {
  const InterpretationTree one = ChainTree({2.0});
  EXPECT_EQ(AvgSubtreeStrength(one, 0), 2.0);
  const InterpretationTree two = ChainTree({2.0, 4.0});
  EXPECT_EQ(AvgSubtreeStrength(two, 0), 3.0);
  EXPECT_EQ(AvgSubtreeStrength(two, 1), 4.0);
  EXPECT_THROW(AvgSubtreeStrength(two, 2), NotInternalError);
  EXPECT_THROW(AvgSubtreeStrength(two, 99), NotInternalError);
}

TEST(AvgSubtreeStrength, EveryNodeMatchesOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const InterpretationTree tree =
        ShapeTree(rng, RandomG(rng, 1 + rng() % 12, trial % 2));
    const PrunedTree full = PrunedTree::Full(tree);
    for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
      if (tree.nodes[i].is_leaf()) continue;
      const double exact =
          oracle::AvgSubtree(tree, full.internal, static_cast<int>(i)).get_d();
      EXPECT_NEAR(AvgSubtreeStrength(tree, static_cast<int>(i)), exact,
                  1e-12 * std::max(1.0, std::fabs(exact)));
    }
  }
}

TEST(PruneSequence, SingleLeaf) {
  const InterpretationTree leaf = ChainTree({});
  const PruneSequence sequence = BuildPruneSequence(leaf);
  EXPECT_EQ(sequence.size(), 1u);
  EXPECT_TRUE(sequence.lambdas.empty());
  EXPECT_EQ(sequence.lambda(0), 0.0);
}

// The root's average (1 + 3) / 2 = 2 is below the child's 3, so the whole
// tree collapses in one step.
TEST(PruneSequence, WeakestLinkCanBeTheRoot) {
  const InterpretationTree chain = ChainTree({1.0, 3.0});
  const PruneSequence sequence = BuildPruneSequence(chain);
  ASSERT_EQ(sequence.size(), 2u);
  EXPECT_EQ(sequence.lambdas, (std::vector<double>{2.0}));
  EXPECT_EQ(sequence.collapsed_at_step[0], (std::vector<int>{0}));
  EXPECT_EQ(sequence.trees[1], PrunedTree::RootOnly(chain));
  EXPECT_EQ(oracle::AvgSubtree(chain, PrunedTree::Full(chain).internal, 0),
            mpq_class(2));
}

TEST(PruneSequence, DeepestFirstWhenWeaker) {
  const InterpretationTree chain = ChainTree({3.0, 1.0});
  const PruneSequence sequence = BuildPruneSequence(chain);
  ASSERT_EQ(sequence.size(), 3u);
  EXPECT_EQ(sequence.lambdas, (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(sequence.collapsed_at_step[0], (std::vector<int>{1}));
}

TEST(PruneSequence, TiedMinimizersCollapseTogether) {
  // Root with two leafy internal children of equal strength.
  std::mt19937_64 rng(0);
  InterpretationTree tree;
  for (int attempt = 0; attempt < 100; ++attempt) {
    tree = ShapeTree(rng, {5.0, 1.0, 1.0});
    if (tree.node(tree.root().left).split && tree.node(tree.root().right).split) {
      break;
    }
  }
  ASSERT_TRUE(tree.node(tree.root().left).split &&
              tree.node(tree.root().right).split);
  const PruneSequence sequence = BuildPruneSequence(tree);
  ASSERT_EQ(sequence.size(), 3u);
  EXPECT_EQ(sequence.lambdas, (std::vector<double>{1.0, 5.0}));
  EXPECT_EQ(sequence.collapsed_at_step[0].size(), 2u);
  EXPECT_EQ(sequence.trees[1].num_internal(), 1);
}

TEST(PruneSequence, NestedMonotoneOnRandomTrees) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const InterpretationTree tree =
        ShapeTree(rng, RandomG(rng, rng() % 30, trial % 3 == 0));
    const PruneSequence sequence = BuildPruneSequence(tree);
    ASSERT_GE(sequence.size(), 1u);
    ASSERT_EQ(sequence.lambdas.size() + 1, sequence.size());
    EXPECT_EQ(sequence.trees.front(), PrunedTree::Full(tree));
    EXPECT_EQ(sequence.trees.back(), PrunedTree::RootOnly(tree));
    for (std::size_t k = 0; k + 1 < sequence.size(); ++k) {
      EXPECT_TRUE(IsStrictSubset(sequence.trees[k + 1], sequence.trees[k]));
      EXPECT_TRUE(ClosedUpward(tree, sequence.trees[k + 1]));
      if (k > 0) {
        EXPECT_LE(sequence.lambdas[k - 1], sequence.lambdas[k]);
      }
    }
  }
}

// T_k maximizes the penalized strength at lambda_k over every subtree.
TEST(PruneSequence, PenalizedOptimalityExhaustive) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 150; ++trial) {
    const InterpretationTree tree =
        ShapeTree(rng, RandomG(rng, rng() % 11, trial % 2 == 0));
    const PruneSequence sequence = BuildPruneSequence(tree);
    const auto subtrees = oracle::AllSubtrees(tree);
    for (std::size_t k = 0; k < sequence.size(); ++k) {
      const mpq_class lambda(sequence.lambda(k));
      const mpq_class mine =
          oracle::Penalized(tree, sequence.trees[k].internal, lambda);
      mpq_class best = mine;
      for (const auto& s : subtrees) {
        const mpq_class p = oracle::Penalized(tree, s, lambda);
        if (p > best) best = p;
      }
      const double scale = std::max(1.0, std::fabs(best.get_d()));
      EXPECT_LE(mpq_class(best - mine).get_d(), 1e-9 * scale)
          << "trial " << trial << " k " << k;
    }
  }
}

TEST(Materialize, RenumbersAndKeepsStats) {
  std::mt19937_64 rng(5);
  const InterpretationTree tree = ShapeTree(rng, {1, 2, 3, 4, 5, 6});
  for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
    const_cast<TreeNode&>(tree.nodes[i]).stats.n = 100 + i;
  }
  const PruneSequence sequence = BuildPruneSequence(tree);
  for (const PrunedTree& pruned : sequence.trees) {
    const InterpretationTree small = Materialize(tree, pruned);
    const std::vector<int> members = pruned.Members(tree);
    ASSERT_EQ(small.num_nodes(), members.size());
    EXPECT_EQ(static_cast<int>(small.num_internal()), pruned.num_internal());
    // Preorder of the pruned tree visits members in ascending T_0 id.
    for (std::size_t i = 0; i < members.size(); ++i) {
      EXPECT_EQ(small.nodes[i].node_id, static_cast<int>(i));
      EXPECT_EQ(small.nodes[i].stats, tree.nodes[members[i]].stats);
    }
    EXPECT_NEAR(TotalStrength(small), TotalStrength(tree, pruned), 1e-12);
  }
}

}  // namespace
}  // namespace girp
