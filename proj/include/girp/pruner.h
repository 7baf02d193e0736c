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

// Weakest-link pruning on average split strength.
//
// For a tree T, G(T) = sum over internal nodes of |G(t)| and the penalized
// strength is G(T) - lambda * |internal(T)|. Pruning repeatedly collapses
// the internal node(s) whose subtree has the smallest average strength
// g(T_t) = G(T_t) / |internal(T_t)|, recording that minimum as lambda_k.

#ifndef GIRP_PRUNER_H_
#define GIRP_PRUNER_H_

#include <stdexcept>
#include <vector>

#include "girp/tree.h"

namespace girp {

// A subtree of T_0 obtained by collapsing internal nodes, given as the set
// of T_0 node ids that are still internal. The set is closed upward: an
// internal node's parent is internal.
struct PrunedTree {
  std::vector<bool> internal;

  static PrunedTree Full(const InterpretationTree& tree);
  static PrunedTree RootOnly(const InterpretationTree& tree);

  bool is_internal(int id) const { return internal[id]; }
  int num_internal() const;
  // Node ids reachable from the root (internal nodes plus their children).
  std::vector<int> Members(const InterpretationTree& tree) const;

  friend bool operator==(const PrunedTree&, const PrunedTree&) = default;
};

class NotInternalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PruneSequence {
  // trees[0] is T_0, trees.back() is the root-only tree T_K.
  std::vector<PrunedTree> trees;
  // lambdas[k-1] is lambda_k for k = 1..K; lambda_0 = 0 is implicit.
  std::vector<double> lambdas;
  // collapsed_at_step[k-1]: T_0 node ids collapsed to produce trees[k].
  std::vector<std::vector<int>> collapsed_at_step;

  std::size_t size() const { return trees.size(); }
  double lambda(std::size_t k) const { return k == 0 ? 0.0 : lambdas[k - 1]; }
};

// Sum of |g_value| over internal nodes, in ascending node id.
double TotalStrength(const InterpretationTree& tree, const PrunedTree& pruned);
double TotalStrength(const InterpretationTree& tree);

double PenalizedStrength(const InterpretationTree& tree,
                         const PrunedTree& pruned, double lambda);

// Throws NotInternalError when `node_id` is not internal in `pruned`.
double AvgSubtreeStrength(const InterpretationTree& tree,
                          const PrunedTree& pruned, int node_id);
double AvgSubtreeStrength(const InterpretationTree& tree, int node_id);

// Ties at the minimum are collapsed together in one step.
PruneSequence BuildPruneSequence(const InterpretationTree& tree);

// Standalone copy of a pruned tree, renumbered in preorder. Collapsed nodes
// become leaves and keep their stats and samples.
InterpretationTree Materialize(const InterpretationTree& tree,
                               const PrunedTree& pruned);

}  // namespace girp

#endif  // GIRP_PRUNER_H_
