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

// End-to-end interpretation tree construction: partition the rows, grow T_0
// on the build part, prune it into a nested sequence and pick the size that
// scores best on the validation part.

#ifndef GIRP_PIPELINE_H_
#define GIRP_PIPELINE_H_

#include <string>

#include "girp/data_model.h"
#include "girp/pruner.h"
#include "girp/render.h"
#include "girp/selector.h"
#include "girp/tree.h"

namespace girp {

struct BuildResult {
  DatasetSplit split;
  InterpretationTree full_tree;
  PruneSequence sequence;
  SelectionReport selection;
  InterpretationTree chosen_tree;  // renumbered copy of T_chosen_k
  TreeMetadata metadata;
};

BuildResult BuildInterpretationTree(const Dataset& dataset,
                                    const GrowParams& params);

// Same, with explicit build and validation sets.
BuildResult BuildInterpretationTree(const Dataset& build,
                                    const Dataset& validation,
                                    const GrowParams& params);

// Selection report: per-tree scores, chosen tree, partition sizes and the
// collapse steps.
std::string ReportToJson(const BuildResult& result, const GrowParams& params);

// Every tree of the sequence as its list of internal T_0 node ids.
std::string SequenceToJson(const BuildResult& result);

}  // namespace girp

#endif  // GIRP_PIPELINE_H_
