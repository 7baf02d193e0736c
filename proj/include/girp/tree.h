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

#ifndef GIRP_TREE_H_
#define GIRP_TREE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "girp/data_model.h"
#include "girp/split_search.h"

namespace girp {

struct NodeStats {
  std::size_t n = 0;
  double mean_predicted_score = 0.0;
  // Fraction of samples carrying the positive label; set only when labels
  // and a positive label were supplied.
  std::optional<double> accuracy;

  friend bool operator==(const NodeStats&, const NodeStats&) = default;
};

struct TreeNode {
  int node_id = 0;
  int depth = 0;
  int parent = -1;
  int left = -1;   // predicate false
  int right = -1;  // predicate true
  std::optional<ScoredSplit> split;
  NodeStats stats;
  // Build-set rows reaching this node, ascending. Empty for imported trees.
  std::vector<std::size_t> sample_indices;

  bool is_leaf() const { return !split.has_value(); }
};

// Binary interpretation tree. Nodes are stored in preorder and a node's id
// is its position, so children always have larger ids than their parent.
struct InterpretationTree {
  std::vector<Column> columns;
  std::vector<TreeNode> nodes;

  const TreeNode& root() const { return nodes.front(); }
  const TreeNode& node(int id) const { return nodes.at(id); }
  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_internal() const;
  int height() const;
};

struct GrowParams {
  int max_depth = 100;  // edges from the root
  std::size_t min_node_size = 20;
  int max_categorical_exhaustive = 8;
  double validation_fraction = 0.25;
  std::uint64_t seed = 42;
  int workers = 1;
  std::optional<std::string> positive_label;
};

// Throws DataError for max_depth < 1, min_node_size < 1 or
// max_categorical_exhaustive < 1.
void ValidateGrowParams(const GrowParams& params);

NodeStats ComputeNodeStats(std::span<const std::size_t> rows,
                           const ContributionMatrix& contributions,
                           const std::optional<std::string>& positive_label);

// Greedy recursive partitioning of `build_indices`. A node becomes a leaf at
// max_depth, when it has fewer than 2 * min_node_size samples, or when no
// split has positive strength.
InterpretationTree GrowTree(const FeatureTable& features,
                            const ContributionMatrix& contributions,
                            std::span<const std::size_t> build_indices,
                            const GrowParams& params);

}  // namespace girp

#endif  // GIRP_TREE_H_
