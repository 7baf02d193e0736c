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

#include "girp/selector.h"

#include "girp/errors.h"
#include "girp/stats.h"

namespace girp {

RouteResult Route(std::span<const double> row, const InterpretationTree& tree,
                  const PrunedTree& pruned) {
  RouteResult result;
  int id = 0;
  while (pruned.internal[id]) {
    const TreeNode& node = tree.nodes[id];
    result.path.push_back(id);
    const Split& split = node.split->split;
    id = split.Satisfies(row[split.var_index]) ? node.right : node.left;
  }
  result.leaf = id;
  return result;
}

RouteResult Route(std::span<const double> row, const InterpretationTree& tree) {
  return Route(row, tree, PrunedTree::Full(tree));
}

std::vector<double> ValidationNodeStrengths(
    const InterpretationTree& tree, const FeatureTable& validation_features,
    const ContributionMatrix& validation_contributions) {
  CheckPaired(validation_features, validation_contributions);
  if (validation_features.columns() != tree.columns) {
    throw DataError(DataError::Code::kSchema,
                    "validation columns differ from the tree's columns");
  }
  const std::size_t num_nodes = tree.num_nodes();
  std::vector<std::vector<std::size_t>> left(num_nodes), right(num_nodes);
  const PrunedTree full = PrunedTree::Full(tree);
  std::vector<double> row;
  for (std::size_t r = 0; r < validation_features.num_rows(); ++r) {
    row = validation_features.row(r);
    const RouteResult route = Route(row, tree, full);
    for (std::size_t step = 0; step < route.path.size(); ++step) {
      const int id = route.path[step];
      const int next =
          step + 1 < route.path.size() ? route.path[step + 1] : route.leaf;
      (next == tree.nodes[id].right ? right : left)[id].push_back(r);
    }
  }

  std::vector<double> strengths(num_nodes, 0.0);
  for (std::size_t id = 0; id < num_nodes; ++id) {
    const TreeNode& node = tree.nodes[id];
    if (node.is_leaf() || left[id].empty() || right[id].empty()) continue;
    const auto contrib =
        validation_contributions.column(node.split->split.var_index);
    const double diff = OffsetMean(contrib, left[id]) -
                        OffsetMean(contrib, right[id]);
    const double g = node.split->g_value;
    strengths[id] = g > 0 ? diff : (g < 0 ? -diff : 0.0);
  }
  return strengths;
}

double ValidationNodeStrength(
    const InterpretationTree& tree, int node_id,
    const FeatureTable& validation_features,
    const ContributionMatrix& validation_contributions) {
  return ValidationNodeStrengths(tree, validation_features,
                                 validation_contributions)
      .at(node_id);
}

double ValidationTreeStrength(const PrunedTree& pruned,
                              std::span<const double> node_strengths) {
  double total = 0.0;
  for (std::size_t i = 0; i < node_strengths.size(); ++i) {
    if (pruned.internal[i]) total += node_strengths[i];
  }
  return total;
}

SelectionReport SelectBest(const InterpretationTree& tree,
                           const PruneSequence& sequence,
                           const FeatureTable& validation_features,
                           const ContributionMatrix& validation_contributions) {
  if (sequence.trees.empty()) {
    throw InvariantError("empty prune sequence");
  }
  const std::vector<double> strengths = ValidationNodeStrengths(
      tree, validation_features, validation_contributions);

  SelectionReport report;
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    const PrunedTree& pruned = sequence.trees[k];
    report.per_tree.push_back(TreeScore{k, pruned.num_internal(),
                                        sequence.lambda(k),
                                        ValidationTreeStrength(pruned, strengths)});
  }
  // Scan from the smallest tree so ties keep the smaller one.
  std::size_t best = sequence.size() - 1;
  for (std::size_t k = sequence.size() - 1; k-- > 0;) {
    if (report.per_tree[k].g_validation > report.per_tree[best].g_validation) {
      best = k;
    }
  }
  report.chosen_k = best;
  report.chosen_lambda = sequence.lambda(best);
  return report;
}

}  // namespace girp
