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

#include "girp/errors.h"
#include "girp/stats.h"
#include "girp/tree.h"

namespace girp {
namespace {

class Grower {
 public:
  Grower(const FeatureTable& features, const ContributionMatrix& contributions,
         const GrowParams& params, InterpretationTree& tree)
      : features_(features),
        contributions_(contributions),
        params_(params),
        split_params_{params.min_node_size, params.max_categorical_exhaustive,
                      params.workers},
        tree_(tree) {}

  // Appends the subtree for `rows` in preorder and returns its root id.
  int Grow(std::vector<std::size_t> rows, int depth, int parent) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    {
      TreeNode& node = tree_.nodes.back();
      node.node_id = id;
      node.depth = depth;
      node.parent = parent;
      node.stats =
          ComputeNodeStats(rows, contributions_, params_.positive_label);
    }

    std::optional<ScoredSplit> split;
    if (depth < params_.max_depth) {
      split = BestSplit(rows, features_, contributions_, split_params_);
    }
    if (!split) {
      tree_.nodes[id].sample_indices = std::move(rows);
      return id;
    }

    std::vector<std::size_t> left, right;
    const auto values = features_.column_values(split->split.var_index);
    for (std::size_t r : rows) {
      (split->split.Satisfies(values[r]) ? right : left).push_back(r);
    }
    tree_.nodes[id].split = std::move(split);
    tree_.nodes[id].sample_indices = std::move(rows);

    const int left_id = Grow(std::move(left), depth + 1, id);
    const int right_id = Grow(std::move(right), depth + 1, id);
    tree_.nodes[id].left = left_id;
    tree_.nodes[id].right = right_id;
    return id;
  }

 private:
  const FeatureTable& features_;
  const ContributionMatrix& contributions_;
  const GrowParams& params_;
  SplitParams split_params_;
  InterpretationTree& tree_;
};

}  // namespace

std::size_t InterpretationTree::num_internal() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(),
                    [](const TreeNode& node) { return !node.is_leaf(); }));
}

int InterpretationTree::height() const {
  int height = 0;
  for (const TreeNode& node : nodes) height = std::max(height, node.depth);
  return height;
}

void ValidateGrowParams(const GrowParams& params) {
  if (params.max_depth < 0) {
    throw DataError(DataError::Code::kInvalidArgument, "max_depth must be >= 0");
  }
  if (params.min_node_size < 1) {
    throw DataError(DataError::Code::kInvalidArgument,
                    "min_node_size must be >= 1");
  }
  if (params.max_categorical_exhaustive < 1 ||
      params.max_categorical_exhaustive > 20) {
    throw DataError(DataError::Code::kInvalidArgument,
                    "max_categorical_exhaustive must be in [1, 20]");
  }
  if (params.workers < 1) {
    throw DataError(DataError::Code::kInvalidArgument, "workers must be >= 1");
  }
}

NodeStats ComputeNodeStats(std::span<const std::size_t> rows,
                           const ContributionMatrix& contributions,
                           const std::optional<std::string>& positive_label) {
  NodeStats stats;
  stats.n = rows.size();
  if (rows.empty()) return stats;
  stats.mean_predicted_score = OffsetMean(contributions.predicted_scores(), rows);
  if (positive_label && contributions.labels()) {
    const auto& labels = *contributions.labels();
    std::size_t hits = 0;
    for (std::size_t r : rows) hits += labels[r] == *positive_label;
    stats.accuracy = static_cast<double>(hits) / static_cast<double>(rows.size());
  }
  return stats;
}

InterpretationTree GrowTree(const FeatureTable& features,
                            const ContributionMatrix& contributions,
                            std::span<const std::size_t> build_indices,
                            const GrowParams& params) {
  ValidateGrowParams(params);
  CheckPaired(features, contributions);
  if (build_indices.empty()) {
    throw DataError(DataError::Code::kInvalidArgument,
                    "cannot grow a tree on an empty sample set");
  }
  std::vector<std::size_t> rows(build_indices.begin(), build_indices.end());
  std::sort(rows.begin(), rows.end());

  InterpretationTree tree;
  tree.columns = features.columns();
  Grower(features, contributions, params, tree).Grow(std::move(rows), 0, -1);
  return tree;
}

}  // namespace girp
