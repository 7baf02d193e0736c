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

#include "girp/split_search.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numeric>
#include <utility>

#include "girp/stats.h"

namespace girp {
namespace {

struct Candidate {
  Split split;
  double left_mean = 0.0;
  double right_mean = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;

  double strength() const { return std::fabs(left_mean - right_mean); }
};

// Strictly better: larger |G|, then the tie-break order.
bool Better(const Candidate& a, const Candidate& b) {
  const double sa = a.strength();
  const double sb = b.strength();
  if (sa != sb) return sa > sb;
  return TieBreakLess(a.split, b.split);
}

std::vector<std::size_t> SortedCopy(std::span<const std::size_t> subset) {
  std::vector<std::size_t> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

// Calls visit(candidate) for every split of column `col` over `rows`
// (ascending sample indices). Means use offsets from the node's first
// contribution so a constant column scores exactly zero.
template <typename Visit>
void ScanColumn(std::size_t col, std::span<const std::size_t> rows,
                const FeatureTable& features,
                const ContributionMatrix& contributions,
                int max_categorical_exhaustive, Visit&& visit) {
  const std::size_t n = rows.size();
  if (n < 2) return;
  const std::span<const double> values = features.column_values(col);
  const std::span<const double> contrib = contributions.column(col);
  const double base = contrib[rows.front()];
  const FeatureKind& kind = features.column(col).kind;

  switch (kind.tag) {
    case KindTag::kBinary: {
      double sum_right = 0.0, sum_left = 0.0;
      std::size_t n_right = 0;
      for (std::size_t r : rows) {
        if (values[r] == 1.0) {
          sum_right += contrib[r] - base;
          ++n_right;
        } else {
          sum_left += contrib[r] - base;
        }
      }
      if (n_right == 0 || n_right == n) return;
      const std::size_t n_left = n - n_right;
      visit(Candidate{Split{col, IsOne{}},
                      base + sum_left / static_cast<double>(n_left),
                      base + sum_right / static_cast<double>(n_right), n_left,
                      n_right});
      return;
    }

    case KindTag::kOrdinal: {
      std::vector<std::size_t> order(rows.begin(), rows.end());
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return values[a] < values[b];
                       });
      // prefix[k]: offsets of the k smallest values; suffix[k]: the rest.
      std::vector<double> prefix(n + 1, 0.0), suffix(n + 1, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        prefix[k + 1] = prefix[k] + (contrib[order[k]] - base);
      }
      for (std::size_t k = n; k-- > 0;) {
        suffix[k] = suffix[k + 1] + (contrib[order[k]] - base);
      }
      for (std::size_t k = 1; k < n; ++k) {
        const double lo = values[order[k - 1]];
        const double hi = values[order[k]];
        if (!(lo < hi)) continue;
        double threshold = std::midpoint(lo, hi);
        if (!(lo < threshold)) threshold = hi;
        // v < threshold holds for the k smallest values: they go right.
        visit(Candidate{Split{col, LessThan{threshold}},
                        base + suffix[k] / static_cast<double>(n - k),
                        base + prefix[k] / static_cast<double>(k), n - k, k});
      }
      return;
    }

    case KindTag::kCategorical: {
      const int num_levels = kind.num_levels();
      std::vector<double> level_sum(num_levels, 0.0);
      std::vector<std::size_t> level_count(num_levels, 0);
      for (std::size_t r : rows) {
        const int code = static_cast<int>(values[r]);
        level_sum[code] += contrib[r] - base;
        ++level_count[code];
      }
      std::vector<int> present;
      for (int l = 0; l < num_levels; ++l) {
        if (level_count[l] > 0) present.push_back(l);
      }
      const std::size_t num_present = present.size();
      if (num_present < 2) return;

      // Right side = levels in `in_right`, summed in ascending code order.
      auto emit = [&](std::vector<int> right_levels) {
        std::vector<char> in_right(num_levels, 0);
        for (int l : right_levels) in_right[l] = 1;
        double sum_right = 0.0, sum_left = 0.0;
        std::size_t n_right = 0;
        for (int l : present) {
          if (in_right[l]) {
            sum_right += level_sum[l];
            n_right += level_count[l];
          } else {
            sum_left += level_sum[l];
          }
        }
        const std::size_t n_left = n - n_right;
        visit(Candidate{Split{col, InSubset{std::move(right_levels)}},
                        base + sum_left / static_cast<double>(n_left),
                        base + sum_right / static_cast<double>(n_right),
                        n_left, n_right});
      };

      if (static_cast<int>(num_present) <= max_categorical_exhaustive) {
        // Subsets containing the lowest present level, excluding the full
        // set: 2^(L-1) - 1 of them.
        const std::uint64_t full = (std::uint64_t{1} << num_present) - 1;
        for (std::uint64_t mask = 1; mask < full; mask += 2) {
          std::vector<int> subset;
          for (std::size_t b = 0; b < num_present; ++b) {
            if (mask >> b & 1) subset.push_back(present[b]);
          }
          emit(std::move(subset));
        }
        return;
      }

      // Order levels by mean contribution (ties by code) and cut.
      std::vector<int> ordered = present;
      std::vector<double> level_mean(num_levels, 0.0);
      for (int l : present) {
        level_mean[l] = base + level_sum[l] / static_cast<double>(level_count[l]);
      }
      std::stable_sort(ordered.begin(), ordered.end(), [&](int a, int b) {
        return level_mean[a] < level_mean[b];
      });
      for (std::size_t cut = 1; cut < num_present; ++cut) {
        std::vector<int> head(ordered.begin(), ordered.begin() + cut);
        std::vector<int> tail(ordered.begin() + cut, ordered.end());
        std::vector<int>& chosen =
            std::find(head.begin(), head.end(), present.front()) != head.end()
                ? head
                : tail;
        std::sort(chosen.begin(), chosen.end());
        emit(std::move(chosen));
      }
      return;
    }
  }
}

std::optional<Candidate> BestInColumns(std::size_t first, std::size_t last,
                                       std::span<const std::size_t> rows,
                                       const FeatureTable& features,
                                       const ContributionMatrix& contributions,
                                       const SplitParams& params) {
  std::optional<Candidate> best;
  for (std::size_t col = first; col < last; ++col) {
    ScanColumn(col, rows, features, contributions,
               params.max_categorical_exhaustive, [&](Candidate&& candidate) {
                 if (candidate.left_count < params.min_node_size ||
                     candidate.right_count < params.min_node_size) {
                   return;
                 }
                 if (!best || Better(candidate, *best)) {
                   best = std::move(candidate);
                 }
               });
  }
  return best;
}

// Below this many (row, column) cells a node is scanned on one thread.
constexpr std::size_t kParallelCells = 1 << 15;

}  // namespace

bool Split::Satisfies(double value) const {
  return std::visit(
      [value](const auto& predicate) -> bool {
        using T = std::decay_t<decltype(predicate)>;
        if constexpr (std::is_same_v<T, IsOne>) {
          return value == 1.0;
        } else if constexpr (std::is_same_v<T, LessThan>) {
          return value < predicate.threshold;
        } else {
          const int code = static_cast<int>(value);
          return std::binary_search(predicate.levels.begin(),
                                    predicate.levels.end(), code);
        }
      },
      predicate);
}

std::string Split::Describe(const std::vector<Column>& columns) const {
  const Column& column = columns.at(var_index);
  if (std::holds_alternative<IsOne>(predicate)) return column.name + " = 1";
  if (const auto* lt = std::get_if<LessThan>(&predicate)) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", lt->threshold);
    return column.name + " < " + buffer;
  }
  const auto& levels = std::get<InSubset>(predicate).levels;
  std::string out = column.name + " in {";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0) out += ", ";
    const int code = levels[i];
    out += code >= 0 && code < column.kind.num_levels()
               ? column.kind.levels[code]
               : std::to_string(code);
  }
  return out + "}";
}

bool TieBreakLess(const Split& a, const Split& b) {
  if (a.var_index != b.var_index) return a.var_index < b.var_index;
  if (a.predicate.index() != b.predicate.index()) {
    return a.predicate.index() > b.predicate.index();  // IsOne last
  }
  if (const auto* lt = std::get_if<LessThan>(&a.predicate)) {
    return lt->threshold < std::get<LessThan>(b.predicate).threshold;
  }
  if (const auto* in = std::get_if<InSubset>(&a.predicate)) {
    return in->levels < std::get<InSubset>(b.predicate).levels;
  }
  return false;
}

std::vector<Split> EnumerateSplits(std::size_t column,
                                   std::span<const std::size_t> subset,
                                   const FeatureTable& features,
                                   const ContributionMatrix& contributions,
                                   int max_categorical_exhaustive) {
  const auto rows = SortedCopy(subset);
  std::vector<Split> splits;
  ScanColumn(column, rows, features, contributions, max_categorical_exhaustive,
             [&](Candidate&& candidate) {
               splits.push_back(std::move(candidate.split));
             });
  return splits;
}

ScoredSplit SplitStrength(const Split& split,
                          std::span<const std::size_t> subset,
                          const FeatureTable& features,
                          const ContributionMatrix& contributions) {
  const auto rows = SortedCopy(subset);
  const std::span<const double> values = features.column_values(split.var_index);
  std::vector<std::size_t> left, right;
  for (std::size_t r : rows) {
    (split.Satisfies(values[r]) ? right : left).push_back(r);
  }
  if (left.empty() || right.empty()) {
    throw EmptyChildError("split sends every sample to one side");
  }
  const std::span<const double> contrib = contributions.column(split.var_index);
  ScoredSplit scored;
  scored.split = split;
  scored.left_mean = OffsetMean(contrib, left);
  scored.right_mean = OffsetMean(contrib, right);
  scored.g_value = scored.left_mean - scored.right_mean;
  scored.left_count = left.size();
  scored.right_count = right.size();
  return scored;
}

std::optional<ScoredSplit> BestSplit(std::span<const std::size_t> subset,
                                     const FeatureTable& features,
                                     const ContributionMatrix& contributions,
                                     const SplitParams& params) {
  const std::size_t min_size = std::max<std::size_t>(params.min_node_size, 1);
  if (subset.size() < 2 * min_size) return std::nullopt;
  const auto rows = SortedCopy(subset);
  const std::size_t num_columns = features.num_columns();

  std::optional<Candidate> best;
  const std::size_t workers = std::min<std::size_t>(
      std::max(params.workers, 1), num_columns);
  if (workers > 1 && rows.size() * num_columns >= kParallelCells) {
    std::vector<std::future<std::optional<Candidate>>> parts;
    const std::size_t chunk = (num_columns + workers - 1) / workers;
    for (std::size_t first = 0; first < num_columns; first += chunk) {
      const std::size_t last = std::min(num_columns, first + chunk);
      parts.push_back(std::async(std::launch::async, [&, first, last] {
        return BestInColumns(first, last, rows, features, contributions,
                             params);
      }));
    }
    for (auto& part : parts) {
      auto candidate = part.get();
      if (candidate && (!best || Better(*candidate, *best))) {
        best = std::move(candidate);
      }
    }
  } else {
    best = BestInColumns(0, num_columns, rows, features, contributions, params);
  }

  if (!best || best->strength() == 0.0) return std::nullopt;
  // Report the winner with per-side sums in ascending sample order.
  ScoredSplit scored = SplitStrength(best->split, rows, features, contributions);
  if (scored.g_value == 0.0) return std::nullopt;
  return scored;
}

}  // namespace girp
