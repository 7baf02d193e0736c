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

// Paired feature table and contribution matrix, their CSV/JSON file formats,
// and the build/validation partition.
//
// Features file: CSV with a header row of column names, optionally with a
// leading `__row_id` column. Schema sidecar: JSON object mapping each column
// name to {"kind": "binary"|"ordinal"|"categorical", "levels": [...]}; the
// table's column order follows the schema's key order. Contributions file:
// CSV whose feature columns repeat the features header, followed by
// `__predicted_score` and an optional `__label`. Rows pair up by order; when
// both files carry `__row_id` the ids are cross-checked.

#ifndef GIRP_DATA_MODEL_H_
#define GIRP_DATA_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace girp {

inline constexpr std::string_view kRowIdColumn = "__row_id";
inline constexpr std::string_view kPredictedScoreColumn = "__predicted_score";
inline constexpr std::string_view kLabelColumn = "__label";

enum class KindTag { kBinary, kOrdinal, kCategorical };

struct FeatureKind {
  KindTag tag = KindTag::kOrdinal;
  // Categorical only. The position of a label is its integer code.
  std::vector<std::string> levels;

  static FeatureKind Binary() { return {KindTag::kBinary, {}}; }
  static FeatureKind Ordinal() { return {KindTag::kOrdinal, {}}; }
  static FeatureKind Categorical(std::vector<std::string> levels) {
    return {KindTag::kCategorical, std::move(levels)};
  }

  bool is_categorical() const { return tag == KindTag::kCategorical; }
  int num_levels() const { return static_cast<int>(levels.size()); }

  friend bool operator==(const FeatureKind&, const FeatureKind&) = default;
};

const char* KindName(KindTag tag);

struct Column {
  std::string name;
  FeatureKind kind;

  friend bool operator==(const Column&, const Column&) = default;
};

// M x N raw input values, stored column-major. Binary values are 0/1,
// ordinal values are doubles, categorical values are level codes stored as
// exact small integers. Immutable after construction.
class FeatureTable {
 public:
  // `values[c][r]` is row r of column c. Throws DataError on any invariant
  // violation.
  FeatureTable(std::vector<Column> columns,
               std::vector<std::vector<double>> values,
               std::vector<std::string> row_ids);

  std::size_t num_rows() const { return row_ids_.size(); }
  std::size_t num_columns() const { return columns_.size(); }

  const Column& column(std::size_t c) const { return columns_[c]; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::string>& row_ids() const { return row_ids_; }

  double value(std::size_t row, std::size_t c) const { return values_[c][row]; }
  int code(std::size_t row, std::size_t c) const {
    return static_cast<int>(values_[c][row]);
  }
  std::span<const double> column_values(std::size_t c) const {
    return values_[c];
  }
  std::vector<double> row(std::size_t row) const;

  // Text form of a cell: category label or shortest round-trip number.
  std::string FormatValue(std::size_t row, std::size_t c) const;

  // Rows selected in the given order; row ids carried along.
  FeatureTable Subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<double>> values_;
  std::vector<std::string> row_ids_;
};

// M x N contributions c_j^i plus predicted scores p_j and optional labels.
class ContributionMatrix {
 public:
  // `contributions[c][r]`, column-major like FeatureTable.
  ContributionMatrix(std::vector<std::vector<double>> contributions,
                     std::vector<double> predicted_scores,
                     std::optional<std::vector<std::string>> labels =
                         std::nullopt);

  std::size_t num_rows() const { return predicted_scores_.size(); }
  std::size_t num_columns() const { return contributions_.size(); }

  double contribution(std::size_t row, std::size_t c) const {
    return contributions_[c][row];
  }
  std::span<const double> column(std::size_t c) const {
    return contributions_[c];
  }
  double predicted_score(std::size_t row) const {
    return predicted_scores_[row];
  }
  const std::vector<double>& predicted_scores() const {
    return predicted_scores_;
  }
  const std::optional<std::vector<std::string>>& labels() const {
    return labels_;
  }

  ContributionMatrix Subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const ContributionMatrix&,
                         const ContributionMatrix&) = default;

 private:
  std::vector<std::vector<double>> contributions_;
  std::vector<double> predicted_scores_;
  std::optional<std::vector<std::string>> labels_;
};

struct Dataset {
  FeatureTable features;
  ContributionMatrix contributions;
};

// Throws DataError unless `contributions` has the same shape as `features`.
void CheckPaired(const FeatureTable& features,
                 const ContributionMatrix& contributions);

// Schema sidecar: column list in declared order. Categorical columns with
// no "levels" entry get their levels from the data (sorted).
std::vector<Column> ParseSchema(std::string_view json_text);
std::string SchemaToJson(const std::vector<Column>& columns);

FeatureTable ParseFeatures(std::string_view csv_text,
                           const std::vector<Column>& schema);
ContributionMatrix ParseContributions(std::string_view csv_text,
                                      const FeatureTable& features);

std::string FeaturesToCsv(const FeatureTable& features,
                          bool write_row_ids = true);
std::string ContributionsToCsv(const FeatureTable& features,
                               const ContributionMatrix& contributions,
                               bool write_row_ids = true);

// Reads, validates and pairs the three files.
Dataset LoadDataset(const std::string& features_path,
                    const std::string& contributions_path,
                    const std::string& schema_path);
void WriteDataset(const Dataset& dataset, const std::string& features_path,
                  const std::string& contributions_path,
                  const std::string& schema_path);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view content);

// Shortest decimal text that parses back to exactly `value`.
std::string FormatReal(double value);

struct DatasetSplit {
  std::vector<std::size_t> build_indices;       // ascending
  std::vector<std::size_t> validation_indices;  // ascending
  std::uint64_t seed = 0;
  double validation_fraction = 0.25;
};

// Random partition with |validation| = round(M * fraction), clamped to
// [1, M-1]. A pure function of its arguments.
DatasetSplit SplitDataset(std::size_t num_rows, double validation_fraction,
                          std::uint64_t seed);

}  // namespace girp

#endif  // GIRP_DATA_MODEL_H_
