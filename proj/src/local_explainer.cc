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

#include "girp/local_explainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <deque>
#include <map>
#include <random>
#include <utility>

#include <Eigen/Dense>

#include "girp/errors.h"
#include "girp/stats.h"
#include "json.hpp"

namespace girp {
namespace {

using Json = nlohmann::json;
using Code = EndpointError::Code;

void CheckScores(const std::vector<double>& scores, std::size_t expected) {
  if (scores.size() != expected) {
    throw EndpointError(Code::kProtocol,
                        "expected " + std::to_string(expected) +
                            " scores, got " + std::to_string(scores.size()));
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw EndpointError(Code::kNonFinite, "model returned a non-finite score")
          .WithRow(i);
    }
  }
}

Json ParseMessage(const std::string& line) {
  try {
    Json message = Json::parse(line);
    if (!message.is_object() || !message.contains("type") ||
        !message["type"].is_string()) {
      throw EndpointError(Code::kProtocol, "message without a type: " + line);
    }
    return message;
  } catch (const Json::exception&) {
    throw EndpointError(Code::kProtocol, "malformed JSON line: " + line);
  }
}

std::vector<std::vector<double>> FullDesign(std::size_t n) {
  if (n > 20) {
    throw DataError(DataError::Code::kInvalidArgument,
                    "full mask design is limited to 20 features");
  }
  std::vector<std::vector<double>> masks;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (bits >> i & 1) ? 1.0 : 0.0;
    masks.push_back(std::move(z));
  }
  return masks;
}

void CheckPolicy(const PerturbationPolicy& policy, std::size_t n) {
  if (policy.mode == PerturbationPolicy::Mode::kLeaveOneOut) return;
  if (!(policy.mask_probability > 0.0 && policy.mask_probability < 1.0)) {
    throw DataError(DataError::Code::kInvalidArgument,
                    "mask_probability must lie in (0, 1)");
  }
  if (!(policy.ridge >= 0.0)) {
    throw DataError(DataError::Code::kInvalidArgument, "ridge must be >= 0");
  }
  if (!policy.full_design && policy.num_samples != 0 &&
      policy.num_samples < n + 1) {
    throw DataError(DataError::Code::kInvalidArgument,
                    "mask sampling needs at least N + 1 samples");
  }
}

}  // namespace

std::vector<double> FunctionScorer::Score(
    std::span<const std::vector<double>> rows) {
  std::vector<double> scores;
  scores.reserve(rows.size());
  for (const auto& row : rows) scores.push_back(fn_(row));
  CheckScores(scores, rows.size());
  return scores;
}

EndpointScorer::EndpointScorer(const EndpointConfig& config,
                               std::vector<Column> columns)
    : EndpointScorer(config.transport == EndpointConfig::Transport::kTcp
                         ? ConnectTcp(config.address, config.timeout)
                         : SpawnProcess(config.command),
                     config, std::move(columns)) {}

EndpointScorer::EndpointScorer(std::unique_ptr<LineTransport> transport,
                               const EndpointConfig& config,
                               std::vector<Column> columns)
    : transport_(std::move(transport)),
      config_(config),
      columns_(std::move(columns)) {
  if (config_.batch_size == 0) config_.batch_size = 1;
  if (config_.max_in_flight == 0) config_.max_in_flight = 1;
  Handshake();
}

void EndpointScorer::Handshake() {
  transport_->WriteLine(
      Json{{"type", "hello"}, {"n_features", columns_.size()}}.dump());
  const Json reply = ParseMessage(transport_->ReadLine(config_.timeout));
  if (reply["type"] != "ready") {
    throw EndpointError(Code::kProtocol,
                        "expected ready, got " + reply.dump());
  }
}

std::vector<double> EndpointScorer::Score(
    std::span<const std::vector<double>> rows) {
  std::vector<double> scores(rows.size());
  struct Pending {
    std::size_t first = 0;
    std::size_t count = 0;
  };
  std::map<std::int64_t, Pending> pending;
  std::deque<std::int64_t> order;  // ids in send order
  std::size_t next_row = 0;

  auto encode = [&](const std::vector<double>& row) {
    Json out = Json::array();
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const FeatureKind& kind = columns_[c].kind;
      if (kind.is_categorical()) {
        out.push_back(kind.levels.at(static_cast<std::size_t>(row[c])));
      } else {
        out.push_back(row[c]);
      }
    }
    return out;
  };

  while (next_row < rows.size() || !pending.empty()) {
    try {
      while (next_row < rows.size() && pending.size() < config_.max_in_flight) {
        const std::size_t count =
            std::min(config_.batch_size, rows.size() - next_row);
        Json batch = Json::array();
        for (std::size_t i = 0; i < count; ++i) {
          batch.push_back(encode(rows[next_row + i]));
        }
        const std::int64_t id = next_id_++;
        pending[id] = Pending{next_row, count};
        order.push_back(id);
        next_row += count;
        transport_->WriteLine(
            Json{{"type", "predict"}, {"id", id}, {"rows", std::move(batch)}}
                .dump());
      }

      const Json reply = ParseMessage(transport_->ReadLine(config_.timeout));
      if (reply["type"] != "scores" || !reply.contains("id") ||
          !reply["id"].is_number_integer() || !reply.contains("scores") ||
          !reply["scores"].is_array()) {
        throw EndpointError(Code::kProtocol, "unexpected message " + reply.dump());
      }
      const auto id = reply["id"].get<std::int64_t>();
      auto it = pending.find(id);
      if (it == pending.end()) {
        throw EndpointError(Code::kProtocol,
                            "reply for unknown request id " + std::to_string(id));
      }
      std::vector<double> batch_scores;
      for (const Json& s : reply["scores"]) {
        if (s.is_null()) {
          // NaN and infinities serialize as null.
          batch_scores.push_back(std::numeric_limits<double>::quiet_NaN());
        } else if (s.is_number()) {
          batch_scores.push_back(s.get<double>());
        } else {
          throw EndpointError(Code::kProtocol, "score is not a number");
        }
      }
      try {
        CheckScores(batch_scores, it->second.count);
      } catch (const EndpointError& e) {
        throw e.WithRow(it->second.first + e.row().value_or(0));
      }
      std::copy(batch_scores.begin(), batch_scores.end(),
                scores.begin() + static_cast<std::ptrdiff_t>(it->second.first));
      pending.erase(it);
      order.erase(std::find(order.begin(), order.end(), id));
    } catch (const EndpointError& e) {
      if (e.row() || order.empty()) throw;
      throw e.WithRow(pending.at(order.front()).first);
    }
  }
  return scores;
}

std::vector<double> ComputeBaseline(const FeatureTable& features) {
  std::vector<std::size_t> all(features.num_rows());
  for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
  std::vector<double> baseline(features.num_columns(), 0.0);
  for (std::size_t c = 0; c < features.num_columns(); ++c) {
    const FeatureKind& kind = features.column(c).kind;
    switch (kind.tag) {
      case KindTag::kBinary:
        baseline[c] = 0.0;
        break;
      case KindTag::kOrdinal:
        baseline[c] = OffsetMean(features.column_values(c), all);
        break;
      case KindTag::kCategorical: {
        std::vector<std::size_t> counts(kind.num_levels(), 0);
        for (std::size_t r = 0; r < features.num_rows(); ++r) {
          ++counts[features.code(r, c)];
        }
        baseline[c] = static_cast<double>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
        break;
      }
    }
  }
  return baseline;
}

Explanation ExplainSample(std::span<const double> row, Scorer& scorer,
                          const PerturbationPolicy& policy,
                          std::span<const double> baseline,
                          std::uint64_t row_seed) {
  const std::size_t n = row.size();
  CheckPolicy(policy, n);
  std::vector<std::vector<double>> queries;
  queries.emplace_back(row.begin(), row.end());

  if (policy.mode == PerturbationPolicy::Mode::kLeaveOneOut) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> perturbed(row.begin(), row.end());
      perturbed[i] = baseline[i];
      queries.push_back(std::move(perturbed));
    }
    const std::vector<double> scores = scorer.Score(queries);
    Explanation out{std::vector<double>(n), scores[0]};
    for (std::size_t i = 0; i < n; ++i) {
      out.contributions[i] = scores[0] - scores[i + 1];
    }
    return out;
  }

  std::vector<std::vector<double>> masks;
  if (policy.full_design) {
    masks = FullDesign(n);
  } else {
    const std::size_t count = policy.num_samples != 0
                                  ? policy.num_samples
                                  : std::max<std::size_t>(2 * (n + 1), 64);
    std::mt19937_64 rng(row_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    masks.assign(count, std::vector<double>(n));
    for (auto& z : masks) {
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = unit(rng) < policy.mask_probability ? 0.0 : 1.0;
      }
    }
  }
  for (const auto& z : masks) {
    std::vector<double> perturbed(row.begin(), row.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (z[i] == 0.0) perturbed[i] = baseline[i];
    }
    queries.push_back(std::move(perturbed));
  }
  const std::vector<double> scores = scorer.Score(queries);

  // Ridge via the augmented system [X; sqrt(ridge) * [0 I]] beta = [y; 0].
  const auto m = static_cast<Eigen::Index>(masks.size());
  const auto p = static_cast<Eigen::Index>(n + 1);
  const bool penalized = policy.ridge > 0.0;
  Eigen::MatrixXd design =
      Eigen::MatrixXd::Zero(m + (penalized ? p - 1 : 0), p);
  Eigen::VectorXd target = Eigen::VectorXd::Zero(design.rows());
  for (Eigen::Index s = 0; s < m; ++s) {
    design(s, 0) = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      design(s, static_cast<Eigen::Index>(i) + 1) = masks[s][i];
    }
    target(s) = scores[static_cast<std::size_t>(s) + 1];
  }
  if (penalized) {
    const double root = std::sqrt(policy.ridge);
    for (Eigen::Index i = 1; i < p; ++i) design(m + i - 1, i) = root;
  }
  const Eigen::VectorXd beta =
      design.completeOrthogonalDecomposition().solve(target);

  Explanation out{std::vector<double>(n), scores[0]};
  for (std::size_t i = 0; i < n; ++i) {
    out.contributions[i] = beta(static_cast<Eigen::Index>(i) + 1);
  }
  return out;
}

ContributionMatrix BuildContributionMatrix(const FeatureTable& features,
                                           Scorer& scorer,
                                           const PerturbationPolicy& policy,
                                           std::size_t rows_per_call) {
  const std::size_t m = features.num_rows();
  const std::size_t n = features.num_columns();
  CheckPolicy(policy, n);
  const std::vector<double> baseline = ComputeBaseline(features);

  // Each table row's queries are gathered so that several rows share one
  // Score call (and the endpoint's request pipeline); scores are split
  // back out per row and replayed to ExplainSample.
  class Replay : public Scorer {
   public:
    std::vector<std::vector<double>> queries;
    std::vector<double> answers;
    bool recording = true;
    std::size_t cursor = 0;

    std::vector<double> Score(std::span<const std::vector<double>> rows) override {
      if (recording) {
        queries.insert(queries.end(), rows.begin(), rows.end());
        return std::vector<double>(rows.size(), 0.0);
      }
      std::vector<double> out(answers.begin() + static_cast<std::ptrdiff_t>(cursor),
                              answers.begin() +
                                  static_cast<std::ptrdiff_t>(cursor + rows.size()));
      cursor += rows.size();
      return out;
    }
  };

  std::vector<std::vector<double>> contributions(n, std::vector<double>(m));
  std::vector<double> scores(m);
  rows_per_call = std::max<std::size_t>(rows_per_call, 1);
  for (std::size_t start = 0; start < m; start += rows_per_call) {
    const std::size_t stop = std::min(m, start + rows_per_call);
    Replay replay;
    std::vector<std::size_t> offsets;  // first query of each row
    for (std::size_t r = start; r < stop; ++r) {
      offsets.push_back(replay.queries.size());
      const std::vector<double> row = features.row(r);
      ExplainSample(row, replay, policy, baseline, policy.seed ^ r);
    }
    try {
      replay.answers = scorer.Score(replay.queries);
    } catch (const EndpointError& e) {
      std::size_t failed = start;
      if (e.row()) {
        const auto it =
            std::upper_bound(offsets.begin(), offsets.end(), *e.row());
        failed = start + static_cast<std::size_t>(it - offsets.begin()) - 1;
      }
      throw e.WithRow(failed + 1);
    }
    replay.recording = false;
    for (std::size_t r = start; r < stop; ++r) {
      const std::vector<double> row = features.row(r);
      const Explanation explanation =
          ExplainSample(row, replay, policy, baseline, policy.seed ^ r);
      for (std::size_t c = 0; c < n; ++c) {
        contributions[c][r] = explanation.contributions[c];
      }
      scores[r] = explanation.predicted_score;
    }
  }
  return ContributionMatrix(std::move(contributions), std::move(scores));
}

}  // namespace girp
