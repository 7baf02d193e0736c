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

#ifndef GIRP_TESTS_TEST_UTIL_H_
#define GIRP_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "girp/data_model.h"
#include "girp/split_search.h"
#include "girp/tree.h"

namespace girp::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern =
        (std::filesystem::temp_directory_path() / "girp_test_XXXXXX").string();
    path_ = ::mkdtemp(pattern.data());
  }
  ~TempDir() {
    std::error_code ignored;
    std::filesystem::remove_all(path_, ignored);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct RandomTableOptions {
  std::size_t rows = 50;
  std::size_t columns = 5;
  // Ordinal values are drawn from this many distinct values (0 = continuous).
  int ordinal_grid = 0;
  int max_levels = 6;
  // Contributions are small integers when true (exact ties become likely).
  bool integer_contributions = false;
};

// Mixed-kind table with random contributions. Column kinds cycle through
// ordinal, binary, categorical, with a few columns forced constant.
inline Dataset RandomDataset(std::mt19937_64& rng,
                             const RandomTableOptions& options) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Column> columns;
  std::vector<std::vector<double>> values(options.columns,
                                          std::vector<double>(options.rows));
  std::vector<std::vector<double>> contributions(
      options.columns, std::vector<double>(options.rows));
  for (std::size_t c = 0; c < options.columns; ++c) {
    const int kind = static_cast<int>(rng() % 3);
    Column column{"c" + std::to_string(c), FeatureKind::Ordinal()};
    int levels = 0;
    if (kind == 1) {
      column.kind = FeatureKind::Binary();
    } else if (kind == 2) {
      levels = 2 + static_cast<int>(rng() % (options.max_levels - 1));
      std::vector<std::string> labels;
      for (int l = 0; l < levels; ++l) labels.push_back("l" + std::to_string(l));
      column.kind = FeatureKind::Categorical(labels);
    }
    const bool constant_contrib = rng() % 7 == 0;
    const double constant_value = std::round(unit(rng) * 100.0) / 8.0;
    for (std::size_t r = 0; r < options.rows; ++r) {
      double v;
      if (kind == 1) {
        v = unit(rng) < 0.5 ? 0.0 : 1.0;
      } else if (kind == 2) {
        v = static_cast<double>(rng() % levels);
      } else if (options.ordinal_grid > 0) {
        v = static_cast<double>(rng() % options.ordinal_grid) / 4.0;
      } else {
        v = unit(rng) * 10.0 - 5.0;
      }
      values[c][r] = v;
      double contribution;
      if (constant_contrib) {
        contribution = constant_value;
      } else if (options.integer_contributions) {
        contribution = static_cast<double>(static_cast<int>(rng() % 9) - 4);
      } else {
        contribution = (unit(rng) - 0.5) * 4.0 + 0.1 * v;
      }
      contributions[c][r] = contribution;
    }
    columns.push_back(std::move(column));
  }
  std::vector<double> scores(options.rows);
  for (std::size_t r = 0; r < options.rows; ++r) {
    for (std::size_t c = 0; c < options.columns; ++c) scores[r] += contributions[c][r];
  }
  std::vector<std::string> ids(options.rows);
  for (std::size_t r = 0; r < options.rows; ++r) ids[r] = std::to_string(r);
  return Dataset{FeatureTable(columns, std::move(values), std::move(ids)),
                 ContributionMatrix(std::move(contributions), std::move(scores))};
}


namespace internal {

inline int AddShapeNode(InterpretationTree& tree, int parent, int depth,
                        int num_internal, std::mt19937_64& rng,
                        const std::vector<double>& g_values, std::size_t& next_g) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes[id].node_id = id;
  tree.nodes[id].parent = parent;
  tree.nodes[id].depth = depth;
  tree.nodes[id].stats.n = 1;
  if (num_internal == 0) return id;
  ScoredSplit split;
  split.split = Split{0, LessThan{static_cast<double>(id)}};
  split.g_value = g_values[next_g++];
  split.left_count = split.right_count = 1;
  tree.nodes[id].split = split;
  const int left_internal =
      static_cast<int>(rng() % static_cast<std::uint64_t>(num_internal));
  const int left = AddShapeNode(tree, id, depth + 1, left_internal, rng,
                                g_values, next_g);
  const int right = AddShapeNode(tree, id, depth + 1,
                                 num_internal - 1 - left_internal, rng,
                                 g_values, next_g);
  tree.nodes[id].left = left;
  tree.nodes[id].right = right;
  return id;
}

}  // namespace internal

// Tree of the given shape-random layout whose internal nodes, in preorder,
// carry `g_values`. Splits are placeholders; only g_value matters.
inline InterpretationTree ShapeTree(std::mt19937_64& rng,
                                    const std::vector<double>& g_values) {
  InterpretationTree tree;
  tree.columns = {Column{"x", FeatureKind::Ordinal()}};
  std::size_t next_g = 0;
  internal::AddShapeNode(tree, -1, 0, static_cast<int>(g_values.size()), rng,
                         g_values, next_g);
  return tree;
}

// Internal nodes each with the next as left child; right children are
// leaves. Preorder ids: chain node i is 2i's left descendant.
inline InterpretationTree ChainTree(const std::vector<double>& g_values) {
  InterpretationTree tree;
  tree.columns = {Column{"x", FeatureKind::Ordinal()}};
  const int k = static_cast<int>(g_values.size());
  // Preorder: c0, c1, ..., c_{k-1}, leaf(left of c_{k-1}), then right leaves
  // bottom-up: right(c_{k-1}), right(c_{k-2}), ..., right(c0).
  tree.nodes.resize(2 * k + 1);
  for (int i = 0; i <= k; ++i) {
    TreeNode& node = tree.nodes[i];
    node.node_id = i;
    node.depth = i;
    node.parent = i - 1;
    node.stats.n = 1;
  }
  for (int i = 0; i < k; ++i) {
    const int right = 2 * k - i;
    TreeNode& leaf = tree.nodes[right];
    leaf.node_id = right;
    leaf.depth = i + 1;
    leaf.parent = i;
    leaf.stats.n = 1;
    TreeNode& node = tree.nodes[i];
    ScoredSplit split;
    split.split = Split{0, LessThan{static_cast<double>(i)}};
    split.g_value = g_values[i];
    node.split = split;
    node.left = i + 1;
    node.right = right;
  }
  return tree;
}

inline std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

// Random subset of [0, n) of the given size, in random order.
inline std::vector<std::size_t> RandomSubset(std::mt19937_64& rng,
                                             std::size_t n, std::size_t size) {
  std::vector<std::size_t> rows = AllRows(n);
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(size);
  return rows;
}

}  // namespace girp::testing

#endif  // GIRP_TESTS_TEST_UTIL_H_
