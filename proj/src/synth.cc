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

#include "girp/synth.h"

#include <algorithm>
#include <random>
#include <utility>

#include "girp/errors.h"
#include "json.hpp"

namespace girp::synth {
namespace {

using Json = nlohmann::ordered_json;

void CheckRules(const std::vector<Column>& columns,
                const std::vector<PlantedRule>& rules) {
  for (std::size_t k = 0; k < rules.size(); ++k) {
    const PlantedRule& rule = rules[k];
    const std::string where = "rule " + std::to_string(k);
    if (rule.target_var >= columns.size()) {
      throw DataError(DataError::Code::kInvalidArgument,
                      where + " targets column " +
                          std::to_string(rule.target_var) + " of " +
                          std::to_string(columns.size()));
    }
    if (!(rule.noise_sd >= 0.0)) {
      throw DataError(DataError::Code::kInvalidArgument,
                      where + " has negative noise_sd");
    }
    for (const GuardTerm& term : rule.guard) {
      const std::size_t var = term.split.var_index;
      if (var >= columns.size()) {
        throw DataError(DataError::Code::kInvalidArgument,
                        where + " guards column " + std::to_string(var) +
                            " of " + std::to_string(columns.size()));
      }
      const KindTag tag = columns[var].kind.tag;
      const bool fits =
          (tag == KindTag::kBinary &&
           std::holds_alternative<IsOne>(term.split.predicate)) ||
          (tag == KindTag::kOrdinal &&
           std::holds_alternative<LessThan>(term.split.predicate)) ||
          (tag == KindTag::kCategorical &&
           std::holds_alternative<InSubset>(term.split.predicate));
      if (!fits) {
        throw DataError(DataError::Code::kInvalidArgument,
                        where + " uses a predicate that does not fit column '" +
                            columns[var].name + "'");
      }
    }
  }
}

}  // namespace

SynthData Generate(const std::vector<Column>& columns,
                   const std::vector<PlantedRule>& rules, std::size_t num_rows,
                   std::uint64_t seed) {
  CheckRules(columns, rules);
  if (num_rows == 0) {
    throw DataError(DataError::Code::kInvalidArgument, "num_rows must be >= 1");
  }
  const std::size_t n = columns.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::vector<double>> values(n, std::vector<double>(num_rows));
  for (std::size_t r = 0; r < num_rows; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const FeatureKind& kind = columns[c].kind;
      switch (kind.tag) {
        case KindTag::kOrdinal:
          values[c][r] = unit(rng);
          break;
        case KindTag::kBinary:
          values[c][r] = unit(rng) < 0.5 ? 0.0 : 1.0;
          break;
        case KindTag::kCategorical: {
          std::uniform_int_distribution<int> pick(0, kind.num_levels() - 1);
          values[c][r] = pick(rng);
          break;
        }
      }
    }
  }

  std::vector<std::vector<double>> signal(n, std::vector<double>(num_rows, 0.0));
  std::vector<std::vector<double>> noise(n, std::vector<double>(num_rows, 0.0));
  for (const PlantedRule& rule : rules) {
    for (std::size_t r = 0; r < num_rows; ++r) {
      bool holds = true;
      for (const GuardTerm& term : rule.guard) {
        holds = holds && term.Holds(values[term.split.var_index][r]);
      }
      if (holds) signal[rule.target_var][r] += rule.contribution_level;
      if (rule.noise_sd > 0.0) {
        noise[rule.target_var][r] += rule.noise_sd * gauss(rng);
      }
    }
  }

  std::vector<std::vector<double>> contributions(n,
                                                 std::vector<double>(num_rows));
  std::vector<double> scores(num_rows, 0.0);
  for (std::size_t r = 0; r < num_rows; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      contributions[c][r] = signal[c][r] + noise[c][r];
      scores[r] += contributions[c][r];
    }
  }
  std::vector<std::string> row_ids(num_rows);
  for (std::size_t r = 0; r < num_rows; ++r) row_ids[r] = std::to_string(r);

  return SynthData{
      Dataset{FeatureTable(columns, std::move(values), std::move(row_ids)),
              ContributionMatrix(std::move(contributions), std::move(scores))},
      std::move(signal), std::move(noise)};
}

SynthData Generate(const std::vector<PlantedRule>& rules, std::size_t num_rows,
                   std::size_t num_columns, std::uint64_t seed) {
  std::vector<Column> columns;
  for (std::size_t c = 0; c < num_columns; ++c) {
    columns.push_back(Column{"v" + std::to_string(c), FeatureKind::Ordinal()});
  }
  return Generate(columns, rules, num_rows, seed);
}

Dataset MirroredNoiseCopy(const SynthData& data) {
  const FeatureTable& features = data.dataset.features;
  const std::size_t m = features.num_rows();
  const std::size_t n = features.num_columns();
  std::vector<std::vector<double>> contributions(n, std::vector<double>(m));
  std::vector<double> scores(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      contributions[c][r] = data.signal[c][r] - data.noise[c][r];
      scores[r] += contributions[c][r];
    }
  }
  return Dataset{features, ContributionMatrix(std::move(contributions),
                                              std::move(scores))};
}

std::vector<Column> NestedFixtureColumns() {
  return {
      {"v0", FeatureKind::Ordinal()},
      {"v1", FeatureKind::Ordinal()},
      {"v2", FeatureKind::Ordinal()},
      {"v3", FeatureKind::Categorical({"a", "b", "c", "d"})},
      {"v4", FeatureKind::Binary()},
      {"v5", FeatureKind::Ordinal()},
  };
}

std::vector<PlantedRule> NestedFixtureRules(double root_level,
                                            double child_level,
                                            double noise_sd) {
  const GuardTerm low_v2{Split{2, LessThan{0.5}}, false};
  const GuardTerm high_v2{Split{2, LessThan{0.5}}, true};
  const GuardTerm v4_set{Split{4, IsOne{}}, false};
  return {
      PlantedRule{{low_v2}, 2, root_level, noise_sd},
      PlantedRule{{high_v2, v4_set}, 4, child_level, noise_sd},
  };
}

std::string GroundTruthJson(const std::vector<Column>& columns,
                            const std::vector<PlantedRule>& rules,
                            std::size_t num_rows, std::uint64_t seed) {
  Json doc;
  doc["num_rows"] = num_rows;
  doc["seed"] = seed;
  Json cols = Json::array();
  for (const Column& column : columns) {
    Json col{{"name", column.name}, {"kind", KindName(column.kind.tag)}};
    if (column.kind.is_categorical()) col["levels"] = column.kind.levels;
    cols.push_back(std::move(col));
  }
  doc["columns"] = std::move(cols);
  Json out_rules = Json::array();
  for (const PlantedRule& rule : rules) {
    Json guard = Json::array();
    for (const GuardTerm& term : rule.guard) {
      const std::string text = term.split.Describe(columns);
      guard.push_back(term.negated ? "not (" + text + ")" : text);
    }
    out_rules.push_back(Json{{"guard", std::move(guard)},
                             {"target", columns.at(rule.target_var).name},
                             {"target_index", rule.target_var},
                             {"level", rule.contribution_level},
                             {"noise_sd", rule.noise_sd}});
  }
  doc["rules"] = std::move(out_rules);
  return doc.dump(2) + "\n";
}

void ParseSynthSpec(const std::string& json_text, std::vector<Column>& columns,
                    std::vector<PlantedRule>& rules) {
  columns.clear();
  rules.clear();
  try {
    const Json doc = Json::parse(json_text);
    for (const Json& col : doc.at("columns")) {
      Column column{col.at("name").get<std::string>(), FeatureKind::Ordinal()};
      const std::string kind = col.at("kind").get<std::string>();
      if (kind == "binary") {
        column.kind = FeatureKind::Binary();
      } else if (kind == "categorical") {
        std::vector<std::string> levels;
        const Json& spec = col.at("levels");
        if (spec.is_number_integer()) {
          for (int l = 0; l < spec.get<int>(); ++l) {
            levels.push_back("L" + std::to_string(l));
          }
        } else {
          levels = spec.get<std::vector<std::string>>();
        }
        column.kind = FeatureKind::Categorical(std::move(levels));
      } else if (kind != "ordinal") {
        throw DataError(DataError::Code::kSchema, "unknown kind '" + kind + "'");
      }
      columns.push_back(std::move(column));
    }
    if (doc.contains("rules")) {
      for (const Json& spec : doc.at("rules")) {
        PlantedRule rule;
        rule.target_var = spec.at("target").get<std::size_t>();
        rule.contribution_level = spec.at("level").get<double>();
        rule.noise_sd = spec.value("noise_sd", 0.0);
        for (const Json& term : spec.value("guard", Json::array())) {
          GuardTerm guard;
          guard.split.var_index = term.at("var").get<std::size_t>();
          const std::string op = term.at("op").get<std::string>();
          if (op == "lt" || op == "ge") {
            guard.split.predicate = LessThan{term.at("value").get<double>()};
            guard.negated = op == "ge";
          } else if (op == "eq1" || op == "eq0") {
            guard.split.predicate = IsOne{};
            guard.negated = op == "eq0";
          } else if (op == "in" || op == "not_in") {
            auto levels = term.at("levels").get<std::vector<int>>();
            std::sort(levels.begin(), levels.end());
            guard.split.predicate = InSubset{std::move(levels)};
            guard.negated = op == "not_in";
          } else {
            throw DataError(DataError::Code::kSchema,
                            "unknown guard op '" + op + "'");
          }
          rule.guard.push_back(std::move(guard));
        }
        rules.push_back(std::move(rule));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataError::Code::kSchema,
                    std::string("invalid synth spec: ") + e.what());
  }
  CheckRules(columns, rules);
}

}  // namespace girp::synth
