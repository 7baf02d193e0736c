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

#include "girp/data_model.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "girp/csv.h"
#include "girp/errors.h"
#include "json.hpp"

namespace girp {
namespace {

using Code = DataError::Code;
using OrderedJson = nlohmann::ordered_json;

std::optional<double> ParseReal(std::string_view text) {
  // from_chars does not skip whitespace or accept a leading '+'.
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc::result_out_of_range) {
    // Overflow parses as a non-finite value and is rejected by the caller.
    return text.front() == '-' ? -HUGE_VAL : HUGE_VAL;
  }
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<csv::Record> ParseTable(std::string_view text) {
  auto records = csv::Parse(text);
  while (!records.empty() && records.back().size() == 1 &&
         records.back()[0].empty()) {
    records.pop_back();
  }
  return records;
}

void CheckColumns(const std::vector<Column>& columns) {
  if (columns.empty()) {
    throw DataError(Code::kSchema, "at least one column is required");
  }
  std::unordered_set<std::string> names;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const Column& column = columns[c];
    if (column.name.empty() || column.name.rfind("__", 0) == 0) {
      throw DataError(Code::kSchema,
                      "invalid column name '" + column.name + "'",
                      std::nullopt, c + 1);
    }
    if (!names.insert(column.name).second) {
      throw DataError(Code::kSchema, "duplicate column '" + column.name + "'",
                      std::nullopt, c + 1);
    }
    if (column.kind.is_categorical()) {
      const auto& levels = column.kind.levels;
      if (levels.size() < 2) {
        throw DataError(Code::kSchema,
                        "categorical column '" + column.name +
                            "' needs at least two levels",
                        std::nullopt, c + 1);
      }
      std::unordered_set<std::string> seen(levels.begin(), levels.end());
      if (seen.size() != levels.size()) {
        throw DataError(Code::kSchema,
                        "categorical column '" + column.name +
                            "' has duplicate levels",
                        std::nullopt, c + 1);
      }
    } else if (!column.kind.levels.empty()) {
      throw DataError(Code::kSchema,
                      "levels given for non-categorical column '" +
                          column.name + "'",
                      std::nullopt, c + 1);
    }
  }
}

}  // namespace

const char* KindName(KindTag tag) {
  switch (tag) {
    case KindTag::kBinary: return "binary";
    case KindTag::kOrdinal: return "ordinal";
    case KindTag::kCategorical: return "categorical";
  }
  return "unknown";
}

std::string FormatReal(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw InvariantError("to_chars failed");
  return std::string(buffer, ptr);
}

// ---------------------------------------------------------------------------
// FeatureTable / ContributionMatrix

FeatureTable::FeatureTable(std::vector<Column> columns,
                           std::vector<std::vector<double>> values,
                           std::vector<std::string> row_ids)
    : columns_(std::move(columns)),
      values_(std::move(values)),
      row_ids_(std::move(row_ids)) {
  CheckColumns(columns_);
  if (row_ids_.empty()) {
    throw DataError(Code::kShapeMismatch, "feature table has no rows");
  }
  if (values_.size() != columns_.size()) {
    throw DataError(Code::kShapeMismatch,
                    "expected " + std::to_string(columns_.size()) +
                        " value columns, got " +
                        std::to_string(values_.size()));
  }
  std::unordered_set<std::string> ids;
  for (std::size_t r = 0; r < row_ids_.size(); ++r) {
    if (!ids.insert(row_ids_[r]).second) {
      throw DataError(Code::kDuplicateRowId,
                      "duplicate row id '" + row_ids_[r] + "'", r + 1);
    }
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const auto& column_values = values_[c];
    if (column_values.size() != row_ids_.size()) {
      throw DataError(Code::kShapeMismatch, "column length differs from row count",
                      std::nullopt, c + 1);
    }
    const FeatureKind& kind = columns_[c].kind;
    for (std::size_t r = 0; r < column_values.size(); ++r) {
      const double v = column_values[r];
      if (!std::isfinite(v)) {
        throw DataError(Code::kNonFinite, "non-finite feature value", r + 1,
                        c + 1);
      }
      switch (kind.tag) {
        case KindTag::kBinary:
          if (v != 0.0 && v != 1.0) {
            throw DataError(Code::kNotBinary, "binary value must be 0 or 1",
                            r + 1, c + 1);
          }
          break;
        case KindTag::kCategorical:
          if (v < 0 || v >= kind.num_levels() || v != std::floor(v)) {
            throw DataError(Code::kUnknownLevel, "invalid level code", r + 1,
                            c + 1);
          }
          break;
        case KindTag::kOrdinal:
          break;
      }
    }
  }
}

std::vector<double> FeatureTable::row(std::size_t r) const {
  std::vector<double> out(num_columns());
  for (std::size_t c = 0; c < num_columns(); ++c) out[c] = values_[c][r];
  return out;
}

std::string FeatureTable::FormatValue(std::size_t r, std::size_t c) const {
  const FeatureKind& kind = columns_[c].kind;
  if (kind.is_categorical()) return kind.levels[code(r, c)];
  if (kind.tag == KindTag::kBinary) return values_[c][r] != 0.0 ? "1" : "0";
  return FormatReal(values_[c][r]);
}

FeatureTable FeatureTable::Subset(std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> values(num_columns());
  for (std::size_t c = 0; c < num_columns(); ++c) {
    values[c].reserve(rows.size());
    for (std::size_t r : rows) values[c].push_back(values_[c][r]);
  }
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (std::size_t r : rows) ids.push_back(row_ids_[r]);
  return FeatureTable(columns_, std::move(values), std::move(ids));
}

ContributionMatrix::ContributionMatrix(
    std::vector<std::vector<double>> contributions,
    std::vector<double> predicted_scores,
    std::optional<std::vector<std::string>> labels)
    : contributions_(std::move(contributions)),
      predicted_scores_(std::move(predicted_scores)),
      labels_(std::move(labels)) {
  const std::size_t m = predicted_scores_.size();
  for (std::size_t c = 0; c < contributions_.size(); ++c) {
    if (contributions_[c].size() != m) {
      throw DataError(Code::kShapeMismatch,
                      "contribution column length differs from score count",
                      std::nullopt, c + 1);
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (!std::isfinite(contributions_[c][r])) {
        throw DataError(Code::kNonFinite, "non-finite contribution", r + 1,
                        c + 1);
      }
    }
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (!std::isfinite(predicted_scores_[r])) {
      throw DataError(Code::kNonFinite, "non-finite predicted score", r + 1,
                      contributions_.size() + 1);
    }
  }
  if (labels_ && labels_->size() != m) {
    throw DataError(Code::kShapeMismatch, "label count differs from row count");
  }
}

ContributionMatrix ContributionMatrix::Subset(
    std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> contributions(num_columns());
  for (std::size_t c = 0; c < num_columns(); ++c) {
    contributions[c].reserve(rows.size());
    for (std::size_t r : rows) contributions[c].push_back(contributions_[c][r]);
  }
  std::vector<double> scores;
  scores.reserve(rows.size());
  for (std::size_t r : rows) scores.push_back(predicted_scores_[r]);
  std::optional<std::vector<std::string>> labels;
  if (labels_) {
    labels.emplace();
    for (std::size_t r : rows) labels->push_back((*labels_)[r]);
  }
  return ContributionMatrix(std::move(contributions), std::move(scores),
                            std::move(labels));
}

void CheckPaired(const FeatureTable& features,
                 const ContributionMatrix& contributions) {
  if (features.num_columns() != contributions.num_columns()) {
    throw DataError(Code::kShapeMismatch,
                    "features have " + std::to_string(features.num_columns()) +
                        " columns, contributions have " +
                        std::to_string(contributions.num_columns()));
  }
  if (features.num_rows() != contributions.num_rows()) {
    throw DataError(Code::kShapeMismatch,
                    "features have " + std::to_string(features.num_rows()) +
                        " rows, contributions have " +
                        std::to_string(contributions.num_rows()));
  }
}

// ---------------------------------------------------------------------------
// Schema

std::vector<Column> ParseSchema(std::string_view json_text) {
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(Code::kSchema, std::string("invalid schema JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw DataError(Code::kSchema, "schema must be a JSON object");
  }
  std::vector<Column> columns;
  for (const auto& [name, spec] : doc.items()) {
    if (!spec.is_object() || !spec.contains("kind") ||
        !spec["kind"].is_string()) {
      throw DataError(Code::kSchema, "column '" + name + "' needs a \"kind\"");
    }
    const std::string kind = spec["kind"].get<std::string>();
    Column column{name, {}};
    if (kind == "binary") {
      column.kind = FeatureKind::Binary();
    } else if (kind == "ordinal") {
      column.kind = FeatureKind::Ordinal();
    } else if (kind == "categorical") {
      std::vector<std::string> levels;
      if (spec.contains("levels")) {
        if (!spec["levels"].is_array()) {
          throw DataError(Code::kSchema,
                          "levels of '" + name + "' must be an array");
        }
        for (const auto& level : spec["levels"]) {
          levels.push_back(level.is_string() ? level.get<std::string>()
                                             : level.dump());
        }
      }
      column.kind = FeatureKind::Categorical(std::move(levels));
    } else {
      throw DataError(Code::kSchema,
                      "unknown kind '" + kind + "' for column '" + name + "'");
    }
    if (!column.kind.is_categorical() && spec.contains("levels")) {
      throw DataError(Code::kSchema,
                      "levels given for non-categorical column '" + name + "'");
    }
    columns.push_back(std::move(column));
  }
  return columns;
}

std::string SchemaToJson(const std::vector<Column>& columns) {
  OrderedJson doc = OrderedJson::object();
  for (const Column& column : columns) {
    OrderedJson spec;
    spec["kind"] = KindName(column.kind.tag);
    if (column.kind.is_categorical()) spec["levels"] = column.kind.levels;
    doc[column.name] = std::move(spec);
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV <-> tables

FeatureTable ParseFeatures(std::string_view csv_text,
                           const std::vector<Column>& schema) {
  const auto records = ParseTable(csv_text);
  if (records.empty()) {
    throw DataError(Code::kParse, "features file has no header");
  }
  const csv::Record& header = records.front();
  std::optional<std::size_t> id_field;
  std::map<std::string, std::size_t> field_of;
  for (std::size_t f = 0; f < header.size(); ++f) {
    if (header[f] == kRowIdColumn) {
      id_field = f;
      continue;
    }
    if (!field_of.emplace(header[f], f).second) {
      throw DataError(Code::kHeaderMismatch,
                      "duplicate header '" + header[f] + "'", std::nullopt,
                      f + 1);
    }
  }
  if (field_of.size() != schema.size()) {
    throw DataError(Code::kShapeMismatch,
                    "features file has " + std::to_string(field_of.size()) +
                        " columns, schema declares " +
                        std::to_string(schema.size()));
  }
  std::vector<std::size_t> source(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    auto it = field_of.find(schema[c].name);
    if (it == field_of.end()) {
      throw DataError(Code::kHeaderMismatch,
                      "schema column '" + schema[c].name +
                          "' missing from features file");
    }
    source[c] = it->second;
  }

  const std::size_t m = records.size() - 1;
  std::vector<Column> columns = schema;
  std::vector<std::vector<double>> values(schema.size(),
                                          std::vector<double>(m));
  std::vector<std::string> row_ids(m);
  // Categorical columns without declared levels collect labels first.
  std::vector<std::vector<std::string>> raw_labels(schema.size());

  for (std::size_t r = 0; r < m; ++r) {
    const csv::Record& record = records[r + 1];
    if (record.size() != header.size()) {
      throw DataError(Code::kShapeMismatch,
                      "expected " + std::to_string(header.size()) +
                          " fields, got " + std::to_string(record.size()),
                      r + 1);
    }
    row_ids[r] = id_field ? record[*id_field] : std::to_string(r);
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const std::string& cell = record[source[c]];
      if (cell.empty()) {
        throw DataError(Code::kMissingValue, "missing value", r + 1, c + 1);
      }
      const FeatureKind& kind = schema[c].kind;
      if (kind.is_categorical()) {
        if (kind.levels.empty()) {
          raw_labels[c].push_back(cell);
          continue;
        }
        auto it = std::find(kind.levels.begin(), kind.levels.end(), cell);
        if (it == kind.levels.end()) {
          throw DataError(Code::kUnknownLevel, "unknown level '" + cell + "'",
                          r + 1, c + 1);
        }
        values[c][r] = static_cast<double>(it - kind.levels.begin());
        continue;
      }
      const auto parsed = ParseReal(cell);
      if (!parsed) {
        throw DataError(Code::kNotNumeric, "not a number: '" + cell + "'",
                        r + 1, c + 1);
      }
      if (!std::isfinite(*parsed)) {
        throw DataError(Code::kNonFinite, "non-finite feature value", r + 1,
                        c + 1);
      }
      if (kind.tag == KindTag::kBinary && *parsed != 0.0 && *parsed != 1.0) {
        throw DataError(Code::kNotBinary, "binary value must be 0 or 1", r + 1,
                        c + 1);
      }
      values[c][r] = *parsed;
    }
  }

  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (!schema[c].kind.is_categorical() || !schema[c].kind.levels.empty()) {
      continue;
    }
    std::set<std::string> distinct(raw_labels[c].begin(), raw_labels[c].end());
    std::vector<std::string> levels(distinct.begin(), distinct.end());
    if (levels.size() < 2) {
      // Pad a constant column so the kind invariant (>= 2 levels) holds.
      levels.push_back(levels.empty() ? "" : levels.front() + "_other");
    }
    for (std::size_t r = 0; r < m; ++r) {
      values[c][r] = static_cast<double>(
          std::lower_bound(levels.begin(), levels.end(), raw_labels[c][r]) -
          levels.begin());
    }
    columns[c].kind.levels = std::move(levels);
  }
  return FeatureTable(std::move(columns), std::move(values),
                      std::move(row_ids));
}

ContributionMatrix ParseContributions(std::string_view csv_text,
                                      const FeatureTable& features) {
  const auto records = ParseTable(csv_text);
  if (records.empty()) {
    throw DataError(Code::kParse, "contributions file has no header");
  }
  const csv::Record& header = records.front();
  std::optional<std::size_t> id_field, score_field, label_field;
  std::vector<std::string> names;
  std::vector<std::size_t> name_fields;
  for (std::size_t f = 0; f < header.size(); ++f) {
    if (header[f] == kRowIdColumn) {
      id_field = f;
    } else if (header[f] == kPredictedScoreColumn) {
      score_field = f;
    } else if (header[f] == kLabelColumn) {
      label_field = f;
    } else {
      names.push_back(header[f]);
      name_fields.push_back(f);
    }
  }
  if (!score_field) {
    throw DataError(Code::kHeaderMismatch,
                    std::string("contributions file lacks ") +
                        std::string(kPredictedScoreColumn));
  }
  if (names.size() != features.num_columns()) {
    throw DataError(Code::kShapeMismatch,
                    "contributions have " + std::to_string(names.size()) +
                        " columns, features have " +
                        std::to_string(features.num_columns()));
  }
  // Map each table column to its contribution field by name.
  std::vector<std::size_t> source(features.num_columns());
  for (std::size_t c = 0; c < features.num_columns(); ++c) {
    auto it = std::find(names.begin(), names.end(), features.column(c).name);
    if (it == names.end()) {
      throw DataError(Code::kHeaderMismatch,
                      "contributions lack column '" + features.column(c).name +
                          "'",
                      std::nullopt, c + 1);
    }
    source[c] = name_fields[it - names.begin()];
  }

  const std::size_t m = records.size() - 1;
  if (m != features.num_rows()) {
    throw DataError(Code::kShapeMismatch,
                    "contributions have " + std::to_string(m) +
                        " rows, features have " +
                        std::to_string(features.num_rows()));
  }
  std::vector<std::vector<double>> contributions(features.num_columns(),
                                                 std::vector<double>(m));
  std::vector<double> scores(m);
  std::optional<std::vector<std::string>> labels;
  if (label_field) labels.emplace(m);

  auto parse_cell = [&](const std::string& cell, std::size_t r,
                        std::size_t c) {
    if (cell.empty()) {
      throw DataError(Code::kMissingValue, "missing value", r + 1, c);
    }
    const auto parsed = ParseReal(cell);
    if (!parsed) {
      throw DataError(Code::kNotNumeric, "not a number: '" + cell + "'", r + 1,
                      c);
    }
    if (!std::isfinite(*parsed)) {
      throw DataError(Code::kNonFinite, "non-finite contribution", r + 1, c);
    }
    return *parsed;
  };

  for (std::size_t r = 0; r < m; ++r) {
    const csv::Record& record = records[r + 1];
    if (record.size() != header.size()) {
      throw DataError(Code::kShapeMismatch,
                      "expected " + std::to_string(header.size()) +
                          " fields, got " + std::to_string(record.size()),
                      r + 1);
    }
    if (id_field && record[*id_field] != features.row_ids()[r]) {
      throw DataError(Code::kRowIdMismatch,
                      "row id '" + record[*id_field] +
                          "' does not match features row id '" +
                          features.row_ids()[r] + "'",
                      r + 1);
    }
    for (std::size_t c = 0; c < features.num_columns(); ++c) {
      contributions[c][r] = parse_cell(record[source[c]], r, c + 1);
    }
    scores[r] = parse_cell(record[*score_field], r, features.num_columns() + 1);
    if (labels) (*labels)[r] = record[*label_field];
  }
  return ContributionMatrix(std::move(contributions), std::move(scores),
                            std::move(labels));
}

std::string FeaturesToCsv(const FeatureTable& features, bool write_row_ids) {
  std::string out;
  csv::Record header;
  if (write_row_ids) header.emplace_back(kRowIdColumn);
  for (const Column& column : features.columns()) header.push_back(column.name);
  out += csv::FormatRecord(header);
  for (std::size_t r = 0; r < features.num_rows(); ++r) {
    csv::Record record;
    if (write_row_ids) record.push_back(features.row_ids()[r]);
    for (std::size_t c = 0; c < features.num_columns(); ++c) {
      record.push_back(features.FormatValue(r, c));
    }
    out += csv::FormatRecord(record);
  }
  return out;
}

std::string ContributionsToCsv(const FeatureTable& features,
                               const ContributionMatrix& contributions,
                               bool write_row_ids) {
  CheckPaired(features, contributions);
  std::string out;
  csv::Record header;
  if (write_row_ids) header.emplace_back(kRowIdColumn);
  for (const Column& column : features.columns()) header.push_back(column.name);
  header.emplace_back(kPredictedScoreColumn);
  if (contributions.labels()) header.emplace_back(kLabelColumn);
  out += csv::FormatRecord(header);
  for (std::size_t r = 0; r < contributions.num_rows(); ++r) {
    csv::Record record;
    if (write_row_ids) record.push_back(features.row_ids()[r]);
    for (std::size_t c = 0; c < contributions.num_columns(); ++c) {
      record.push_back(FormatReal(contributions.contribution(r, c)));
    }
    record.push_back(FormatReal(contributions.predicted_score(r)));
    if (contributions.labels()) record.push_back((*contributions.labels())[r]);
    out += csv::FormatRecord(record);
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(Code::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(Code::kIo, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError(Code::kIo, "write failed for '" + path + "'");
}

Dataset LoadDataset(const std::string& features_path,
                    const std::string& contributions_path,
                    const std::string& schema_path) {
  const auto schema = ParseSchema(ReadFile(schema_path));
  FeatureTable features = ParseFeatures(ReadFile(features_path), schema);
  ContributionMatrix contributions =
      ParseContributions(ReadFile(contributions_path), features);
  return Dataset{std::move(features), std::move(contributions)};
}

void WriteDataset(const Dataset& dataset, const std::string& features_path,
                  const std::string& contributions_path,
                  const std::string& schema_path) {
  WriteFile(schema_path, SchemaToJson(dataset.features.columns()));
  WriteFile(features_path, FeaturesToCsv(dataset.features));
  WriteFile(contributions_path,
            ContributionsToCsv(dataset.features, dataset.contributions));
}

// ---------------------------------------------------------------------------
// Build / validation partition

DatasetSplit SplitDataset(std::size_t num_rows, double validation_fraction,
                          std::uint64_t seed) {
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw DataError(Code::kInvalidArgument,
                    "validation fraction must lie in (0, 1)");
  }
  if (num_rows < 2) {
    throw DataError(Code::kInvalidArgument,
                    "at least two rows are needed for a validation split");
  }
  auto num_validation = static_cast<std::size_t>(
      std::llround(static_cast<double>(num_rows) * validation_fraction));
  num_validation = std::clamp<std::size_t>(num_validation, 1, num_rows - 1);

  // Fisher-Yates with mt19937_64, whose output sequence is fixed by the
  // standard; bounded draws use rejection sampling.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(num_rows);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = num_rows - 1; i > 0; --i) {
    const std::uint64_t bound = i + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
      draw = rng();
    } while (draw >= limit);
    std::swap(order[i], order[draw % bound]);
  }

  DatasetSplit split;
  split.seed = seed;
  split.validation_fraction = validation_fraction;
  split.validation_indices.assign(order.begin(),
                                  order.begin() + num_validation);
  split.build_indices.assign(order.begin() + num_validation, order.end());
  std::sort(split.validation_indices.begin(), split.validation_indices.end());
  std::sort(split.build_indices.begin(), split.build_indices.end());
  return split;
}

}  // namespace girp
