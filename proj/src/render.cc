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

#include "girp/render.h"

#include <cstdio>
#include <variant>

#include "girp/errors.h"
#include "json.hpp"

namespace girp {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kEllipsis = "\xE2\x80\xA6";  // U+2026
constexpr const char* kFormatTag = "girp-interpretation-tree";

std::string Short(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

std::string NodeLine(const TreeNode& node) {
  std::string line = "n=" + std::to_string(node.stats.n) +
                     ", score=" + Short(node.stats.mean_predicted_score);
  if (node.stats.accuracy) line += ", acc=" + Short(*node.stats.accuracy);
  return line;
}

std::string SplitLine(const InterpretationTree& tree, const TreeNode& node) {
  const ScoredSplit& s = *node.split;
  return s.split.Describe(tree.columns) + " | G=" + Short(s.g_value) +
         " | L=" + Short(s.left_mean) + " R=" + Short(s.right_mean);
}

bool Elided(const TreeNode& node, std::optional<int> max_levels) {
  return max_levels && node.depth > *max_levels;
}

void AsciiNode(const InterpretationTree& tree, int id, const std::string& tag,
               std::optional<int> max_levels, std::string& out) {
  const TreeNode& node = tree.nodes[id];
  const std::string indent(static_cast<std::size_t>(node.depth) * 2, ' ');
  if (Elided(node, max_levels)) {
    out += indent + tag + kEllipsis + "\n";
    return;
  }
  out += indent + tag + "[" + std::to_string(node.node_id) + "] " +
         NodeLine(node) + "\n";
  if (node.is_leaf()) return;
  out += indent + std::string(tag.size(), ' ') + "    " +
         SplitLine(tree, node) + "\n";
  AsciiNode(tree, node.left, "L ", max_levels, out);
  AsciiNode(tree, node.right, "R ", max_levels, out);
}

std::string DotEscape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  return out;
}

std::string RenderDot(const InterpretationTree& tree,
                      const TreeMetadata& metadata,
                      std::optional<int> max_levels) {
  std::string out = "digraph interpretation_tree {\n";
  out += "  node [shape=box, fontname=\"Helvetica\"];\n";
  if (metadata.g_validation) {
    out += "  label=\"G_validation=" + Short(*metadata.g_validation);
    if (metadata.chosen_lambda) {
      out += ", lambda=" + Short(*metadata.chosen_lambda);
    }
    out += "\";\n";
  }
  for (const TreeNode& node : tree.nodes) {
    const std::string name = "n" + std::to_string(node.node_id);
    if (node.parent >= 0 && Elided(tree.nodes[node.parent], max_levels)) {
      continue;
    }
    if (Elided(node, max_levels)) {
      out += "  " + name + " [label=\"" + kEllipsis + "\", shape=plaintext];\n";
      continue;
    }
    std::string label = "[" + std::to_string(node.node_id) + "] " +
                        NodeLine(node);
    if (!node.is_leaf()) label += "\\n" + DotEscape(SplitLine(tree, node));
    out += "  " + name + " [label=\"" + label + "\"];\n";
  }
  for (const TreeNode& node : tree.nodes) {
    if (node.is_leaf() || Elided(node, max_levels)) continue;
    const std::string name = "n" + std::to_string(node.node_id);
    out += "  " + name + " -> n" + std::to_string(node.left) +
           " [label=\"no\"];\n";
    out += "  " + name + " -> n" + std::to_string(node.right) +
           " [label=\"yes\"];\n";
  }
  out += "}\n";
  return out;
}

Json PredicateToJson(const Split& split, const Column& column) {
  return std::visit(
      [&](const auto& predicate) -> Json {
        using T = std::decay_t<decltype(predicate)>;
        if constexpr (std::is_same_v<T, IsOne>) {
          return Json{{"type", "is_one"}};
        } else if constexpr (std::is_same_v<T, LessThan>) {
          return Json{{"type", "less_than"}, {"threshold", predicate.threshold}};
        } else {
          Json labels = Json::array();
          for (int code : predicate.levels) {
            labels.push_back(code >= 0 && code < column.kind.num_levels()
                                 ? column.kind.levels[code]
                                 : std::to_string(code));
          }
          return Json{{"type", "in_subset"},
                      {"levels", predicate.levels},
                      {"labels", std::move(labels)}};
        }
      },
      split.predicate);
}

[[noreturn]] void Malformed(const std::string& what) {
  throw DataError(DataError::Code::kParse, "malformed tree JSON: " + what);
}

Predicate PredicateFromJson(const Json& doc) {
  const std::string type = doc.at("type").get<std::string>();
  if (type == "is_one") return IsOne{};
  if (type == "less_than") return LessThan{doc.at("threshold").get<double>()};
  if (type == "in_subset") {
    return InSubset{doc.at("levels").get<std::vector<int>>()};
  }
  Malformed("unknown predicate type '" + type + "'");
}

template <typename T>
std::optional<T> OptionalField(const Json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  return doc[key].get<T>();
}

}  // namespace

RenderFormat ParseRenderFormat(std::string_view name) {
  if (name == "ascii") return RenderFormat::kAscii;
  if (name == "dot") return RenderFormat::kDot;
  if (name == "json") return RenderFormat::kJson;
  throw DataError(DataError::Code::kInvalidArgument,
                  "unknown render format '" + std::string(name) + "'");
}

std::string TreeToJson(const InterpretationTree& tree,
                       const TreeMetadata& metadata) {
  Json doc;
  doc["format"] = kFormatTag;
  doc["version"] = 1;
  Json meta = Json::object();
  if (metadata.chosen_lambda) meta["chosen_lambda"] = *metadata.chosen_lambda;
  if (metadata.num_pruned_trees) {
    meta["num_pruned_trees"] = *metadata.num_pruned_trees;
  }
  if (metadata.chosen_k) meta["chosen_k"] = *metadata.chosen_k;
  if (metadata.g_validation) meta["g_validation"] = *metadata.g_validation;
  if (metadata.positive_label) meta["positive_label"] = *metadata.positive_label;
  if (metadata.tree_accuracy) meta["tree_accuracy"] = *metadata.tree_accuracy;
  doc["metadata"] = std::move(meta);

  Json columns = Json::array();
  for (const Column& column : tree.columns) {
    Json col{{"name", column.name}, {"kind", KindName(column.kind.tag)}};
    if (column.kind.is_categorical()) col["levels"] = column.kind.levels;
    columns.push_back(std::move(col));
  }
  doc["columns"] = std::move(columns);

  Json nodes = Json::array();
  for (const TreeNode& node : tree.nodes) {
    Json out;
    out["node_id"] = node.node_id;
    out["depth"] = node.depth;
    out["n"] = node.stats.n;
    out["mean_predicted_score"] = node.stats.mean_predicted_score;
    if (node.stats.accuracy) out["accuracy"] = *node.stats.accuracy;
    if (!node.is_leaf()) {
      const ScoredSplit& s = *node.split;
      const Column& column = tree.columns.at(s.split.var_index);
      out["split"] = Json{{"var_index", s.split.var_index},
                          {"var_name", column.name},
                          {"predicate", PredicateToJson(s.split, column)},
                          {"description", s.split.Describe(tree.columns)},
                          {"g_value", s.g_value},
                          {"left_mean", s.left_mean},
                          {"right_mean", s.right_mean},
                          {"left_count", s.left_count},
                          {"right_count", s.right_count}};
      out["left"] = node.left;
      out["right"] = node.right;
    }
    nodes.push_back(std::move(out));
  }
  doc["nodes"] = std::move(nodes);
  return doc.dump(2) + "\n";
}

InterpretationTree TreeFromJson(std::string_view json_text,
                                TreeMetadata* metadata) {
  InterpretationTree tree;
  try {
    const Json doc = Json::parse(json_text);
    if (doc.value("format", "") != kFormatTag) Malformed("wrong format tag");
    if (metadata != nullptr) {
      const Json& meta = doc.at("metadata");
      metadata->chosen_lambda = OptionalField<double>(meta, "chosen_lambda");
      metadata->num_pruned_trees =
          OptionalField<std::size_t>(meta, "num_pruned_trees");
      metadata->chosen_k = OptionalField<std::size_t>(meta, "chosen_k");
      metadata->g_validation = OptionalField<double>(meta, "g_validation");
      metadata->positive_label =
          OptionalField<std::string>(meta, "positive_label");
      metadata->tree_accuracy = OptionalField<double>(meta, "tree_accuracy");
    }
    for (const Json& col : doc.at("columns")) {
      Column column{col.at("name").get<std::string>(), FeatureKind::Ordinal()};
      const std::string kind = col.at("kind").get<std::string>();
      if (kind == "binary") {
        column.kind = FeatureKind::Binary();
      } else if (kind == "categorical") {
        column.kind = FeatureKind::Categorical(
            col.at("levels").get<std::vector<std::string>>());
      } else if (kind != "ordinal") {
        Malformed("unknown column kind '" + kind + "'");
      }
      tree.columns.push_back(std::move(column));
    }
    const Json& nodes = doc.at("nodes");
    if (!nodes.is_array() || nodes.empty()) Malformed("no nodes");
    for (const Json& in : nodes) {
      TreeNode node;
      node.node_id = in.at("node_id").get<int>();
      if (node.node_id != static_cast<int>(tree.nodes.size())) {
        Malformed("node ids must be 0..n-1 in order");
      }
      node.depth = in.at("depth").get<int>();
      node.stats.n = in.at("n").get<std::size_t>();
      node.stats.mean_predicted_score =
          in.at("mean_predicted_score").get<double>();
      node.stats.accuracy = OptionalField<double>(in, "accuracy");
      if (in.contains("split")) {
        const Json& s = in.at("split");
        ScoredSplit split;
        split.split.var_index = s.at("var_index").get<std::size_t>();
        if (split.split.var_index >= tree.columns.size()) {
          Malformed("split variable out of range");
        }
        split.split.predicate = PredicateFromJson(s.at("predicate"));
        split.g_value = s.at("g_value").get<double>();
        split.left_mean = s.at("left_mean").get<double>();
        split.right_mean = s.at("right_mean").get<double>();
        split.left_count = s.at("left_count").get<std::size_t>();
        split.right_count = s.at("right_count").get<std::size_t>();
        node.split = std::move(split);
        node.left = in.at("left").get<int>();
        node.right = in.at("right").get<int>();
      }
      tree.nodes.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception& e) {
    Malformed(e.what());
  }
  // Link parents and check the preorder shape.
  const int count = static_cast<int>(tree.nodes.size());
  for (TreeNode& node : tree.nodes) {
    if (node.is_leaf()) continue;
    for (int child : {node.left, node.right}) {
      if (child <= node.node_id || child >= count ||
          tree.nodes[child].parent != -1) {
        Malformed("bad child link at node " + std::to_string(node.node_id));
      }
      tree.nodes[child].parent = node.node_id;
      if (tree.nodes[child].depth != node.depth + 1) {
        Malformed("bad depth at node " + std::to_string(child));
      }
    }
  }
  for (int id = 1; id < count; ++id) {
    if (tree.nodes[id].parent < 0) Malformed("orphan node " + std::to_string(id));
  }
  if (tree.nodes[0].depth != 0) Malformed("root depth must be 0");
  return tree;
}

bool StructurallyEqual(const InterpretationTree& a,
                       const InterpretationTree& b) {
  if (a.columns != b.columns || a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const TreeNode& x = a.nodes[i];
    const TreeNode& y = b.nodes[i];
    if (x.node_id != y.node_id || x.depth != y.depth || x.parent != y.parent ||
        x.left != y.left || x.right != y.right || x.split != y.split ||
        x.stats != y.stats) {
      return false;
    }
  }
  return true;
}

std::string Render(const InterpretationTree& tree, RenderFormat format,
                   const TreeMetadata& metadata,
                   std::optional<int> max_levels) {
  switch (format) {
    case RenderFormat::kJson:
      return TreeToJson(tree, metadata);
    case RenderFormat::kDot:
      return RenderDot(tree, metadata, max_levels);
    case RenderFormat::kAscii: {
      std::string out;
      if (!tree.nodes.empty()) AsciiNode(tree, 0, "", max_levels, out);
      return out;
    }
  }
  return {};
}

}  // namespace girp
