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

#ifndef GIRP_STATS_H_
#define GIRP_STATS_H_

#include <cstddef>
#include <span>

namespace girp {

// Mean of values[i] over `indices`, summed in the given order as offsets from
// the first selected value. A set of identical values therefore has a mean
// exactly equal to that value, and negating every input negates the result
// bit for bit. Requires a nonempty index list.
inline double OffsetMean(std::span<const double> values,
                         std::span<const std::size_t> indices) {
  const double base = values[indices.front()];
  double sum = 0.0;
  for (std::size_t i : indices) sum += values[i] - base;
  return base + sum / static_cast<double>(indices.size());
}

}  // namespace girp

#endif  // GIRP_STATS_H_
