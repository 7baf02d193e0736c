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

// Best-size selection on held-out data. Each internal node t scores
//
//   sgn(G_train(t)) * (mean c^i over validation rows routed left
//                      - mean c^i over validation rows routed right)
//
// with i the node's split variable, or 0 when either side receives no
// validation rows. A tree scores the sum over its internal nodes; the
// highest-scoring tree wins, ties going to the smaller tree.

#ifndef GIRP_SELECTOR_H_
#define GIRP_SELECTOR_H_

#include <span>
#include <vector>

#include "girp/data_model.h"
#include "girp/pruner.h"
#include "girp/tree.h"

namespace girp {

struct RouteResult {
  int leaf = 0;
  std::vector<int> path;  // internal node ids from the root

  friend bool operator==(const RouteResult&, const RouteResult&) = default;
};

// Descends from the root: predicate true goes right, false goes left.
// `row` holds one value per column (level codes for categorical columns).
RouteResult Route(std::span<const double> row, const InterpretationTree& tree,
                  const PrunedTree& pruned);
RouteResult Route(std::span<const double> row, const InterpretationTree& tree);

// Validation strength of every node of T_0 (0 for leaves). A node's
// validation rows depend only on its ancestors, so these values hold for
// every pruned tree that keeps the node internal.
std::vector<double> ValidationNodeStrengths(
    const InterpretationTree& tree, const FeatureTable& validation_features,
    const ContributionMatrix& validation_contributions);

double ValidationNodeStrength(const InterpretationTree& tree, int node_id,
                              const FeatureTable& validation_features,
                              const ContributionMatrix& validation_contributions);

struct TreeScore {
  std::size_t k = 0;
  int internal_nodes = 0;
  double lambda = 0.0;
  double g_validation = 0.0;
};

struct SelectionReport {
  std::vector<TreeScore> per_tree;
  std::size_t chosen_k = 0;
  double chosen_lambda = 0.0;

  double chosen_score() const { return per_tree[chosen_k].g_validation; }
};

// Sum of node strengths over the pruned tree's internal nodes, ascending id.
double ValidationTreeStrength(const PrunedTree& pruned,
                              std::span<const double> node_strengths);

SelectionReport SelectBest(const InterpretationTree& tree,
                           const PruneSequence& sequence,
                           const FeatureTable& validation_features,
                           const ContributionMatrix& validation_contributions);

}  // namespace girp

#endif  // GIRP_SELECTOR_H_
