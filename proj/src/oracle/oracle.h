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

// Brute-force reference computations in exact rational arithmetic. Nothing
// here calls into split search, pruning or selection; only the data types
// are shared.

#ifndef GIRP_ORACLE_ORACLE_H_
#define GIRP_ORACLE_ORACLE_H_

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "girp/data_model.h"
#include "girp/split_search.h"
#include "girp/tree.h"

namespace girp::oracle {

struct ExactSplit {
  Split split;
  mpq_class g;  // left mean - right mean, exact
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

// Every admissible split of every column (both children >= min_node_size),
// scored exactly. Enumeration follows the production conventions: midpoint
// thresholds, canonical level subsets containing the lowest present level,
// mean-ordered cuts above `max_categorical_exhaustive` present levels.
std::vector<ExactSplit> AllSplits(std::span<const std::size_t> subset,
                                  const FeatureTable& features,
                                  const ContributionMatrix& contributions,
                                  std::size_t min_node_size,
                                  int max_categorical_exhaustive);

// Maximum |g| with the tie-break of split search; nullopt when nothing is
// admissible or the maximum is zero.
std::optional<ExactSplit> BestSplit(std::span<const std::size_t> subset,
                                    const FeatureTable& features,
                                    const ContributionMatrix& contributions,
                                    std::size_t min_node_size,
                                    int max_categorical_exhaustive);

// Exact strength of one split over the subset (throws if a side is empty).
mpq_class SplitG(const Split& split, std::span<const std::size_t> subset,
                 const FeatureTable& features,
                 const ContributionMatrix& contributions);

class TooLargeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Every subtree of `tree` reachable by collapsing internal nodes, as the
// set of T_0 node ids left internal. Throws TooLargeError above
// `max_internal` internal nodes.
std::vector<std::vector<bool>> AllSubtrees(const InterpretationTree& tree,
                                           int max_internal = 12);

mpq_class TotalStrength(const InterpretationTree& tree,
                        const std::vector<bool>& internal);
mpq_class Penalized(const InterpretationTree& tree,
                    const std::vector<bool>& internal, const mpq_class& lambda);
// g(T_t) over the subtree of `node_id` restricted to `internal`.
mpq_class AvgSubtree(const InterpretationTree& tree,
                     const std::vector<bool>& internal, int node_id);

// Leaf reached by `row` in the full tree, evaluating predicates directly.
int RouteLeaf(std::span<const double> row, const InterpretationTree& tree);

// Exact validation strength of one node: sgn(G_train) times the
// left-minus-right mean of the split variable's contribution over
// validation rows reaching the node, or 0 with an empty side.
mpq_class ValidationNodeStrength(const InterpretationTree& tree, int node_id,
                                 const FeatureTable& validation_features,
                                 const ContributionMatrix& validation_contributions);

}  // namespace girp::oracle

#endif  // GIRP_ORACLE_ORACLE_H_
