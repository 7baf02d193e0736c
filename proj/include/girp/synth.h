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

// Synthetic datasets with planted contribution rules.

#ifndef GIRP_SYNTH_H_
#define GIRP_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "girp/data_model.h"
#include "girp/split_search.h"

namespace girp::synth {

struct GuardTerm {
  Split split;
  bool negated = false;  // term holds when the predicate is false

  bool Holds(double value) const { return split.Satisfies(value) != negated; }
};

// When every guard term holds at row j, c_j^target gains
// `contribution_level`. Independently of the guard, each row's target
// contribution gets N(0, noise_sd) noise.
struct PlantedRule {
  std::vector<GuardTerm> guard;
  std::size_t target_var = 0;
  double contribution_level = 0.0;
  double noise_sd = 0.0;
};

struct SynthData {
  Dataset dataset;
  // Noise-free contributions and the added noise, column-major;
  // contributions = signal + noise.
  std::vector<std::vector<double>> signal;
  std::vector<std::vector<double>> noise;
};

// Features are drawn per kind (ordinal U[0,1), binary fair coin,
// categorical uniform over levels); predicted score is the row sum of
// contributions. A pure function of its arguments. Throws DataError when a
// rule references a column out of range or a guard term's predicate does
// not fit its column's kind.
SynthData Generate(const std::vector<Column>& columns,
                   const std::vector<PlantedRule>& rules, std::size_t num_rows,
                   std::uint64_t seed);

// N ordinal columns named v0..v{N-1}.
SynthData Generate(const std::vector<PlantedRule>& rules, std::size_t num_rows,
                   std::size_t num_columns, std::uint64_t seed);

// Same features as `data` with contributions signal - noise. A split that
// only fits noise on `data` has strength -|G| on this copy.
Dataset MirroredNoiseCopy(const SynthData& data);

// Columns v0..v5: v0, v1, v2, v5 ordinal, v3 categorical (4 levels), v4
// binary.
std::vector<Column> NestedFixtureColumns();

// Two nested rules over NestedFixtureColumns():
//   v2 < 0.5              => c^2 += root_level
//   v2 >= 0.5 and v4 = 1  => c^4 += child_level
std::vector<PlantedRule> NestedFixtureRules(double root_level = 2.0,
                                            double child_level = 0.4,
                                            double noise_sd = 0.0);

// Ground truth as JSON text: columns, rules with rendered guards.
std::string GroundTruthJson(const std::vector<Column>& columns,
                            const std::vector<PlantedRule>& rules,
                            std::size_t num_rows, std::uint64_t seed);

// Parses {"columns": [{"name","kind","levels"?}], "rules": [{"guard":
// [{"var", "op": "lt"|"ge"|"eq1"|"eq0"|"in"|"not_in", "value"|"levels"}],
// "target", "level", "noise_sd"}]}. Categorical "levels" in a column are
// either a list of labels or a count.
void ParseSynthSpec(const std::string& json_text, std::vector<Column>& columns,
                    std::vector<PlantedRule>& rules);

}  // namespace girp::synth

#endif  // GIRP_SYNTH_H_
