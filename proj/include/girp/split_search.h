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

// Candidate splits over one variable and their strength
//
//   G = mean(c^i over S_L) - mean(c^i over S_R)
//
// where i is the split variable, S_R holds the samples satisfying the
// predicate and S_L the rest. The search maximizes |G|.

#ifndef GIRP_SPLIT_SEARCH_H_
#define GIRP_SPLIT_SEARCH_H_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "girp/data_model.h"

namespace girp {

// Binary column: "v == 1".
struct IsOne {
  friend bool operator==(const IsOne&, const IsOne&) = default;
};
// Ordinal column: "v < threshold".
struct LessThan {
  double threshold = 0.0;
  friend bool operator==(const LessThan&, const LessThan&) = default;
};
// Categorical column: "v in levels". Codes sorted ascending; the canonical
// form contains the lowest level code present in the node.
struct InSubset {
  std::vector<int> levels;
  friend bool operator==(const InSubset&, const InSubset&) = default;
};

using Predicate = std::variant<IsOne, LessThan, InSubset>;

struct Split {
  std::size_t var_index = 0;
  Predicate predicate;

  // True sends the sample right. A categorical code outside `levels`
  // (including levels never seen while growing) is false.
  bool Satisfies(double value) const;

  // e.g. "age < 42.5", "smoker = 1", "color in {red, blue}".
  std::string Describe(const std::vector<Column>& columns) const;

  friend bool operator==(const Split&, const Split&) = default;
};

// True when `a` orders before `b` in the deterministic tie-break among
// equally strong splits: lower variable index, then smaller threshold or
// lexicographically smaller level set.
bool TieBreakLess(const Split& a, const Split& b);

struct ScoredSplit {
  Split split;
  double g_value = 0.0;  // left_mean - right_mean, signed
  double left_mean = 0.0;
  double right_mean = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;

  friend bool operator==(const ScoredSplit&, const ScoredSplit&) = default;
};

struct SplitParams {
  std::size_t min_node_size = 1;
  int max_categorical_exhaustive = 8;
  // Worker threads used to scan columns. The result does not depend on it.
  int workers = 1;
};

class EmptyChildError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// All candidate splits on `column` for the samples in `subset`, ignoring
// node-size limits. Categorical columns with more than
// `max_categorical_exhaustive` present levels get the L-1 cuts of the
// levels ordered by mean contribution (needs `contributions`).
std::vector<Split> EnumerateSplits(std::size_t column,
                                   std::span<const std::size_t> subset,
                                   const FeatureTable& features,
                                   const ContributionMatrix& contributions,
                                   int max_categorical_exhaustive);

// Scores one split over `subset`. Each side's mean is summed in ascending
// sample index. Throws EmptyChildError if a side is empty.
ScoredSplit SplitStrength(const Split& split,
                          std::span<const std::size_t> subset,
                          const FeatureTable& features,
                          const ContributionMatrix& contributions);

// Admissible split (both sides >= min_node_size) with the largest |G|, or
// nullopt when none exists or the best strength is zero.
std::optional<ScoredSplit> BestSplit(std::span<const std::size_t> subset,
                                     const FeatureTable& features,
                                     const ContributionMatrix& contributions,
                                     const SplitParams& params);

}  // namespace girp

#endif  // GIRP_SPLIT_SEARCH_H_
