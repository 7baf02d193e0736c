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

#include "oracle/oracle.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace girp::oracle {
namespace {

mpq_class Exact(double value) { return mpq_class(value); }

bool Holds(const Split& split, double value) {
  if (std::holds_alternative<IsOne>(split.predicate)) return value == 1.0;
  if (const auto* lt = std::get_if<LessThan>(&split.predicate)) {
    return value < lt->threshold;
  }
  const auto& levels = std::get<InSubset>(split.predicate).levels;
  return std::find(levels.begin(), levels.end(), static_cast<int>(value)) !=
         levels.end();
}

// Key order used to break ties: variable, then threshold / level list.
bool KeyLess(const Split& a, const Split& b) {
  if (a.var_index != b.var_index) return a.var_index < b.var_index;
  if (const auto* x = std::get_if<LessThan>(&a.predicate)) {
    return x->threshold < std::get<LessThan>(b.predicate).threshold;
  }
  if (const auto* x = std::get_if<InSubset>(&a.predicate)) {
    const auto& y = std::get<InSubset>(b.predicate).levels;
    return std::lexicographical_compare(x->levels.begin(), x->levels.end(),
                                        y.begin(), y.end());
  }
  return false;
}

std::vector<Split> ColumnSplits(std::size_t col,
                                std::span<const std::size_t> subset,
                                const FeatureTable& features,
                                const ContributionMatrix& contributions,
                                int max_categorical_exhaustive) {
  std::vector<Split> out;
  const FeatureKind& kind = features.column(col).kind;
  if (kind.tag == KindTag::kBinary) {
    bool zero = false, one = false;
    for (std::size_t r : subset) {
      (features.value(r, col) == 1.0 ? one : zero) = true;
    }
    if (zero && one) out.push_back(Split{col, IsOne{}});
    return out;
  }
  if (kind.tag == KindTag::kOrdinal) {
    std::set<double> distinct;
    for (std::size_t r : subset) distinct.insert(features.value(r, col));
    std::vector<double> sorted(distinct.begin(), distinct.end());
    for (std::size_t k = 1; k < sorted.size(); ++k) {
      double threshold = std::midpoint(sorted[k - 1], sorted[k]);
      if (!(sorted[k - 1] < threshold)) threshold = sorted[k];
      out.push_back(Split{col, LessThan{threshold}});
    }
    return out;
  }
  std::set<int> present_set;
  for (std::size_t r : subset) present_set.insert(features.code(r, col));
  const std::vector<int> present(present_set.begin(), present_set.end());
  const std::size_t count = present.size();
  if (count < 2) return out;
  if (static_cast<int>(count) <= max_categorical_exhaustive) {
    // Every proper nonempty subset, keeping the one containing present[0].
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << count) - 1; ++mask) {
      if (!(mask & 1)) continue;
      std::vector<int> levels;
      for (std::size_t b = 0; b < count; ++b) {
        if (mask >> b & 1) levels.push_back(present[b]);
      }
      out.push_back(Split{col, InSubset{levels}});
    }
    return out;
  }
  // Levels ordered by exact mean contribution, ties by code.
  std::map<int, std::pair<mpq_class, std::size_t>> sums;
  for (std::size_t r : subset) {
    auto& entry = sums[features.code(r, col)];
    entry.first += Exact(contributions.contribution(r, col));
    ++entry.second;
  }
  std::vector<std::pair<mpq_class, int>> ranked;
  for (const auto& [level, entry] : sums) {
    ranked.emplace_back(entry.first / static_cast<unsigned long>(entry.second),
                        level);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  for (std::size_t cut = 1; cut < count; ++cut) {
    std::vector<int> head, tail;
    for (std::size_t i = 0; i < count; ++i) {
      (i < cut ? head : tail).push_back(ranked[i].second);
    }
    std::vector<int>& chosen =
        std::find(head.begin(), head.end(), present[0]) != head.end() ? head
                                                                      : tail;
    std::sort(chosen.begin(), chosen.end());
    out.push_back(Split{col, InSubset{chosen}});
  }
  return out;
}

void Collect(const InterpretationTree& tree, int id,
             std::vector<std::vector<bool>>& sets) {
  // Extends each partial set in `sets` with every option for node `id`.
  const TreeNode& node = tree.nodes[id];
  if (node.is_leaf()) return;
  std::vector<std::vector<bool>> result;
  for (const auto& base : sets) {
    result.push_back(base);  // collapsed here
    std::vector<std::vector<bool>> kept{base};
    kept.front()[id] = true;
    Collect(tree, node.left, kept);
    Collect(tree, node.right, kept);
    result.insert(result.end(), kept.begin(), kept.end());
  }
  sets = std::move(result);
}

}  // namespace

mpq_class SplitG(const Split& split, std::span<const std::size_t> subset,
                 const FeatureTable& features,
                 const ContributionMatrix& contributions) {
  mpq_class left_sum, right_sum;
  unsigned long left = 0, right = 0;
  for (std::size_t r : subset) {
    const mpq_class c = Exact(contributions.contribution(r, split.var_index));
    if (Holds(split, features.value(r, split.var_index))) {
      right_sum += c;
      ++right;
    } else {
      left_sum += c;
      ++left;
    }
  }
  if (left == 0 || right == 0) throw std::invalid_argument("empty child");
  return mpq_class(left_sum / left) - mpq_class(right_sum / right);
}

std::vector<ExactSplit> AllSplits(std::span<const std::size_t> subset,
                                  const FeatureTable& features,
                                  const ContributionMatrix& contributions,
                                  std::size_t min_node_size,
                                  int max_categorical_exhaustive) {
  std::vector<ExactSplit> out;
  const unsigned long n = subset.size();
  for (std::size_t col = 0; col < features.num_columns(); ++col) {
    const auto splits = ColumnSplits(col, subset, features, contributions,
                                     max_categorical_exhaustive);
    if (splits.empty()) continue;
    // Exact per-value (ordinal) or per-code (binary, categorical) sums; a
    // split's right side is a union of these groups.
    std::map<double, std::pair<mpq_class, unsigned long>> groups;
    mpq_class total;
    for (std::size_t r : subset) {
      const mpq_class c = Exact(contributions.contribution(r, col));
      auto& group = groups[features.value(r, col)];
      group.first += c;
      ++group.second;
      total += c;
    }
    // Ordinal right sides are prefixes of the value order.
    std::vector<double> keys;
    std::vector<mpq_class> prefix_sum{mpq_class(0)};
    std::vector<unsigned long> prefix_count{0};
    for (const auto& [value, group] : groups) {
      keys.push_back(value);
      prefix_sum.push_back(prefix_sum.back() + group.first);
      prefix_count.push_back(prefix_count.back() + group.second);
    }
    for (const Split& split : splits) {
      mpq_class right_sum;
      unsigned long right = 0;
      if (const auto* lt = std::get_if<LessThan>(&split.predicate)) {
        const std::size_t k = static_cast<std::size_t>(
            std::lower_bound(keys.begin(), keys.end(), lt->threshold) -
            keys.begin());
        right_sum = prefix_sum[k];
        right = prefix_count[k];
      } else {
        for (const auto& [value, group] : groups) {
          if (Holds(split, value)) {
            right_sum += group.first;
            right += group.second;
          }
        }
      }
      const unsigned long left = n - right;
      if (left < min_node_size || right < min_node_size) continue;
      const mpq_class left_sum = total - right_sum;
      mpq_class g = mpq_class(left_sum / left) - mpq_class(right_sum / right);
      out.push_back(ExactSplit{split, std::move(g), left, right});
    }
  }
  return out;
}

std::optional<ExactSplit> BestSplit(std::span<const std::size_t> subset,
                                    const FeatureTable& features,
                                    const ContributionMatrix& contributions,
                                    std::size_t min_node_size,
                                    int max_categorical_exhaustive) {
  std::optional<ExactSplit> best;
  for (ExactSplit& candidate :
       AllSplits(subset, features, contributions,
                 std::max<std::size_t>(min_node_size, 1),
                 max_categorical_exhaustive)) {
    if (!best) {
      best = std::move(candidate);
      continue;
    }
    const int order = cmp(abs(candidate.g), abs(best->g));
    if (order > 0 || (order == 0 && KeyLess(candidate.split, best->split))) {
      best = std::move(candidate);
    }
  }
  if (best && sgn(best->g) == 0) return std::nullopt;
  return best;
}

std::vector<std::vector<bool>> AllSubtrees(const InterpretationTree& tree,
                                           int max_internal) {
  if (static_cast<int>(tree.num_internal()) > max_internal) {
    throw TooLargeError("tree has more than " + std::to_string(max_internal) +
                        " internal nodes");
  }
  std::vector<std::vector<bool>> sets{std::vector<bool>(tree.num_nodes(), false)};
  Collect(tree, 0, sets);
  return sets;
}

mpq_class TotalStrength(const InterpretationTree& tree,
                        const std::vector<bool>& internal) {
  mpq_class total;
  for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
    if (internal[i]) total += abs(Exact(tree.nodes[i].split->g_value));
  }
  return total;
}

mpq_class Penalized(const InterpretationTree& tree,
                    const std::vector<bool>& internal,
                    const mpq_class& lambda) {
  const long count = std::count(internal.begin(), internal.end(), true);
  return TotalStrength(tree, internal) - lambda * count;
}

mpq_class AvgSubtree(const InterpretationTree& tree,
                     const std::vector<bool>& internal, int node_id) {
  mpq_class total;
  long count = 0;
  std::vector<int> stack{node_id};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (!internal[id]) continue;
    total += abs(Exact(tree.nodes[id].split->g_value));
    ++count;
    stack.push_back(tree.nodes[id].left);
    stack.push_back(tree.nodes[id].right);
  }
  if (count == 0) throw std::invalid_argument("not an internal node");
  return total / count;
}

int RouteLeaf(std::span<const double> row, const InterpretationTree& tree) {
  int id = 0;
  while (!tree.nodes[id].is_leaf()) {
    const Split& split = tree.nodes[id].split->split;
    id = Holds(split, row[split.var_index]) ? tree.nodes[id].right
                                            : tree.nodes[id].left;
  }
  return id;
}

mpq_class ValidationNodeStrength(
    const InterpretationTree& tree, int node_id,
    const FeatureTable& validation_features,
    const ContributionMatrix& validation_contributions) {
  const TreeNode& node = tree.nodes.at(node_id);
  // Ancestors and the side taken at each.
  std::vector<std::pair<int, bool>> ancestry;
  for (int child = node_id, parent = node.parent; parent >= 0;
       child = parent, parent = tree.nodes[parent].parent) {
    ancestry.emplace_back(parent, tree.nodes[parent].right == child);
  }
  const Split& split = node.split->split;
  mpq_class left_sum, right_sum;
  unsigned long left = 0, right = 0;
  for (std::size_t r = 0; r < validation_features.num_rows(); ++r) {
    bool reaches = true;
    for (const auto& [ancestor, went_right] : ancestry) {
      const Split& s = tree.nodes[ancestor].split->split;
      if (Holds(s, validation_features.value(r, s.var_index)) != went_right) {
        reaches = false;
        break;
      }
    }
    if (!reaches) continue;
    const mpq_class c =
        Exact(validation_contributions.contribution(r, split.var_index));
    if (Holds(split, validation_features.value(r, split.var_index))) {
      right_sum += c;
      ++right;
    } else {
      left_sum += c;
      ++left;
    }
  }
  if (left == 0 || right == 0) return mpq_class(0);
  const mpq_class diff = mpq_class(left_sum / left) - mpq_class(right_sum / right);
  const double g = node.split->g_value;
  return g > 0 ? diff : (g < 0 ? mpq_class(-diff) : mpq_class(0));
}

}  // namespace girp::oracle
