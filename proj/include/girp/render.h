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

// Tree export: JSON (lossless), ASCII and Graphviz DOT.

#ifndef GIRP_RENDER_H_
#define GIRP_RENDER_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "girp/tree.h"

namespace girp {

// Tree-level fields carried alongside the nodes.
struct TreeMetadata {
  std::optional<double> chosen_lambda;
  std::optional<std::size_t> num_pruned_trees;  // K + 1
  std::optional<std::size_t> chosen_k;
  std::optional<double> g_validation;
  std::optional<std::string> positive_label;
  std::optional<double> tree_accuracy;

  friend bool operator==(const TreeMetadata&, const TreeMetadata&) = default;
};

enum class RenderFormat { kAscii, kDot, kJson };

// Throws DataError for anything other than "ascii", "dot" or "json".
RenderFormat ParseRenderFormat(std::string_view name);

std::string TreeToJson(const InterpretationTree& tree,
                       const TreeMetadata& metadata = {});

// Throws DataError on malformed input. Sample indices are not exported, so
// imported nodes have none.
InterpretationTree TreeFromJson(std::string_view json_text,
                                TreeMetadata* metadata = nullptr);

// Equal in every exported field.
bool StructurallyEqual(const InterpretationTree& a,
                       const InterpretationTree& b);

// Nodes deeper than `max_levels` are replaced by a single "…" per elided
// subtree. JSON output ignores max_levels.
std::string Render(const InterpretationTree& tree, RenderFormat format,
                   const TreeMetadata& metadata = {},
                   std::optional<int> max_levels = std::nullopt);

}  // namespace girp

#endif  // GIRP_RENDER_H_
