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

#include "girp/pipeline.h"

#include <numeric>

#include "json.hpp"

namespace girp {
namespace {

using Json = nlohmann::ordered_json;

BuildResult Finish(BuildResult result, const GrowParams& params,
                   const Dataset& validation) {
  result.sequence = BuildPruneSequence(result.full_tree);
  result.selection = SelectBest(result.full_tree, result.sequence,
                                validation.features, validation.contributions);
  result.chosen_tree = Materialize(
      result.full_tree, result.sequence.trees[result.selection.chosen_k]);

  TreeMetadata& meta = result.metadata;
  meta.chosen_lambda = result.selection.chosen_lambda;
  meta.num_pruned_trees = result.sequence.size();
  meta.chosen_k = result.selection.chosen_k;
  meta.g_validation = result.selection.chosen_score();
  meta.positive_label = params.positive_label;
  meta.tree_accuracy = result.chosen_tree.root().stats.accuracy;
  return result;
}

}  // namespace

BuildResult BuildInterpretationTree(const Dataset& dataset,
                                    const GrowParams& params) {
  ValidateGrowParams(params);
  CheckPaired(dataset.features, dataset.contributions);
  BuildResult result;
  result.split = SplitDataset(dataset.features.num_rows(),
                              params.validation_fraction, params.seed);
  result.full_tree = GrowTree(dataset.features, dataset.contributions,
                              result.split.build_indices, params);
  const Dataset validation{
      dataset.features.Subset(result.split.validation_indices),
      dataset.contributions.Subset(result.split.validation_indices)};
  return Finish(std::move(result), params, validation);
}

BuildResult BuildInterpretationTree(const Dataset& build,
                                    const Dataset& validation,
                                    const GrowParams& params) {
  ValidateGrowParams(params);
  CheckPaired(build.features, build.contributions);
  BuildResult result;
  result.split.seed = params.seed;
  result.split.validation_fraction = params.validation_fraction;
  result.split.build_indices.resize(build.features.num_rows());
  std::iota(result.split.build_indices.begin(),
            result.split.build_indices.end(), 0);
  result.full_tree = GrowTree(build.features, build.contributions,
                              result.split.build_indices, params);
  return Finish(std::move(result), params, validation);
}

std::string ReportToJson(const BuildResult& result, const GrowParams& params) {
  Json doc;
  doc["params"] = Json{{"max_depth", params.max_depth},
                       {"min_node_size", params.min_node_size},
                       {"max_categorical_exhaustive",
                        params.max_categorical_exhaustive},
                       {"validation_fraction", params.validation_fraction},
                       {"seed", params.seed}};
  if (params.positive_label) doc["params"]["positive_label"] = *params.positive_label;
  doc["build_rows"] = result.split.build_indices.size();
  doc["validation_rows"] = result.split.validation_indices.size();
  doc["full_tree_internal_nodes"] = result.full_tree.num_internal();
  doc["full_tree_total_strength"] = TotalStrength(result.full_tree);
  Json per_tree = Json::array();
  for (const TreeScore& score : result.selection.per_tree) {
    per_tree.push_back(Json{{"k", score.k},
                            {"internal_nodes", score.internal_nodes},
                            {"lambda", score.lambda},
                            {"g_validation", score.g_validation}});
  }
  doc["per_tree"] = std::move(per_tree);
  doc["chosen_k"] = result.selection.chosen_k;
  doc["chosen_lambda"] = result.selection.chosen_lambda;
  doc["chosen_g_validation"] = result.selection.chosen_score();
  doc["chosen_internal_nodes"] = result.chosen_tree.num_internal();
  doc["collapsed_at_step"] = result.sequence.collapsed_at_step;
  return doc.dump(2) + "\n";
}

std::string SequenceToJson(const BuildResult& result) {
  Json trees = Json::array();
  for (std::size_t k = 0; k < result.sequence.size(); ++k) {
    std::vector<int> internal;
    const PrunedTree& pruned = result.sequence.trees[k];
    for (std::size_t i = 0; i < pruned.internal.size(); ++i) {
      if (pruned.internal[i]) internal.push_back(static_cast<int>(i));
    }
    trees.push_back(Json{{"k", k},
                         {"lambda", result.sequence.lambda(k)},
                         {"internal_node_ids", std::move(internal)}});
  }
  Json doc;
  doc["full_tree"] = Json::parse(TreeToJson(result.full_tree));
  doc["trees"] = std::move(trees);
  return doc.dump(2) + "\n";
}

}  // namespace girp
