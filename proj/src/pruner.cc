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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "girp/errors.h"

namespace girp {
namespace {

double AbsG(const TreeNode& node) { return std::fabs(node.split->g_value); }

// Per-node strength sum and internal count of each node's pruned subtree.
// Children have larger ids, so one descending pass suffices.
struct SubtreeSums {
  std::vector<double> strength;
  std::vector<int> internal;
};

SubtreeSums ComputeSubtreeSums(const InterpretationTree& tree,
                               const PrunedTree& pruned) {
  const std::size_t n = tree.num_nodes();
  SubtreeSums sums{std::vector<double>(n, 0.0), std::vector<int>(n, 0)};
  for (std::size_t i = n; i-- > 0;) {
    if (!pruned.internal[i]) continue;
    const TreeNode& node = tree.nodes[i];
    sums.strength[i] =
        AbsG(node) + sums.strength[node.left] + sums.strength[node.right];
    sums.internal[i] = 1 + sums.internal[node.left] + sums.internal[node.right];
  }
  return sums;
}

void ClearSubtree(const InterpretationTree& tree, int id,
                  std::vector<bool>& internal) {
  if (!internal[id]) return;
  internal[id] = false;
  const TreeNode& node = tree.nodes[id];
  ClearSubtree(tree, node.left, internal);
  ClearSubtree(tree, node.right, internal);
}

void CopySubtree(const InterpretationTree& source, const PrunedTree& pruned,
                 int id, int depth, int parent, InterpretationTree& out) {
  const TreeNode& original = source.nodes[id];
  const int new_id = static_cast<int>(out.nodes.size());
  TreeNode copy;
  copy.node_id = new_id;
  copy.depth = depth;
  copy.parent = parent;
  copy.stats = original.stats;
  copy.sample_indices = original.sample_indices;
  const bool keep = pruned.internal[id];
  if (keep) copy.split = original.split;
  out.nodes.push_back(std::move(copy));
  if (!keep) return;
  const int left = static_cast<int>(out.nodes.size());
  CopySubtree(source, pruned, original.left, depth + 1, new_id, out);
  const int right = static_cast<int>(out.nodes.size());
  CopySubtree(source, pruned, original.right, depth + 1, new_id, out);
  out.nodes[new_id].left = left;
  out.nodes[new_id].right = right;
}

}  // namespace

PrunedTree PrunedTree::Full(const InterpretationTree& tree) {
  PrunedTree pruned;
  pruned.internal.resize(tree.num_nodes());
  for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
    pruned.internal[i] = !tree.nodes[i].is_leaf();
  }
  return pruned;
}

PrunedTree PrunedTree::RootOnly(const InterpretationTree& tree) {
  PrunedTree pruned;
  pruned.internal.assign(tree.num_nodes(), false);
  return pruned;
}

int PrunedTree::num_internal() const {
  return static_cast<int>(std::count(internal.begin(), internal.end(), true));
}

std::vector<int> PrunedTree::Members(const InterpretationTree& tree) const {
  std::vector<int> members;
  for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
    const int parent = tree.nodes[i].parent;
    if (parent < 0 || internal[parent]) members.push_back(static_cast<int>(i));
  }
  return members;
}

double TotalStrength(const InterpretationTree& tree, const PrunedTree& pruned) {
  double total = 0.0;
  for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
    if (pruned.internal[i]) total += AbsG(tree.nodes[i]);
  }
  return total;
}

double TotalStrength(const InterpretationTree& tree) {
  return TotalStrength(tree, PrunedTree::Full(tree));
}

double PenalizedStrength(const InterpretationTree& tree,
                         const PrunedTree& pruned, double lambda) {
  return TotalStrength(tree, pruned) - lambda * pruned.num_internal();
}

double AvgSubtreeStrength(const InterpretationTree& tree,
                          const PrunedTree& pruned, int node_id) {
  if (node_id < 0 || static_cast<std::size_t>(node_id) >= tree.num_nodes() ||
      !pruned.internal[node_id]) {
    throw NotInternalError("node " + std::to_string(node_id) +
                           " is not an internal node");
  }
  const SubtreeSums sums = ComputeSubtreeSums(tree, pruned);
  return sums.strength[node_id] / sums.internal[node_id];
}

double AvgSubtreeStrength(const InterpretationTree& tree, int node_id) {
  return AvgSubtreeStrength(tree, PrunedTree::Full(tree), node_id);
}

PruneSequence BuildPruneSequence(const InterpretationTree& tree) {
  PruneSequence sequence;
  PrunedTree current = PrunedTree::Full(tree);
  sequence.trees.push_back(current);

  while (current.num_internal() > 0) {
    const SubtreeSums sums = ComputeSubtreeSums(tree, current);
    double weakest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
      if (!current.internal[i]) continue;
      weakest = std::min(weakest, sums.strength[i] / sums.internal[i]);
    }
    // Preorder visit: an ancestor collapsed earlier in this step has
    // already cleared its descendants.
    std::vector<int> collapsed;
    PrunedTree next = current;
    for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
      if (!next.internal[i]) continue;
      if (sums.strength[i] / sums.internal[i] == weakest) {
        ClearSubtree(tree, static_cast<int>(i), next.internal);
        collapsed.push_back(static_cast<int>(i));
      }
    }
    if (collapsed.empty()) throw InvariantError("pruning made no progress");
    sequence.lambdas.push_back(weakest);
    sequence.collapsed_at_step.push_back(std::move(collapsed));
    sequence.trees.push_back(next);
    current = std::move(next);
  }
  return sequence;
}

InterpretationTree Materialize(const InterpretationTree& tree,
                               const PrunedTree& pruned) {
  InterpretationTree out;
  out.columns = tree.columns;
  if (tree.nodes.empty()) return out;
  CopySubtree(tree, pruned, 0, 0, -1, out);
  return out;
}

}  // namespace girp
