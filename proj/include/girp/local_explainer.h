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

// Per-sample contributions from a black-box scorer by perturbation.
//
// Prediction protocol (one JSON object per line, UTF-8):
//   -> {"type":"hello","n_features":N}        <- {"type":"ready"}
//   -> {"type":"predict","id":I,"rows":[[v1,...,vN],...]}
//   <- {"type":"scores","id":I,"scores":[s1,...]}
// Categorical values travel as their level labels. Any other reply is a
// protocol violation.

#ifndef GIRP_LOCAL_EXPLAINER_H_
#define GIRP_LOCAL_EXPLAINER_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "girp/data_model.h"
#include "girp/transport.h"

namespace girp {

// Scores rows given in FeatureTable encoding (level codes for categorical
// columns).
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> Score(std::span<const std::vector<double>> rows) = 0;
};

// In-process scorer over a plain function.
class FunctionScorer : public Scorer {
 public:
  explicit FunctionScorer(std::function<double(std::span<const double>)> fn)
      : fn_(std::move(fn)) {}
  std::vector<double> Score(std::span<const std::vector<double>> rows) override;

 private:
  std::function<double(std::span<const double>)> fn_;
};

struct EndpointConfig {
  enum class Transport { kProcess, kTcp };
  Transport transport = Transport::kProcess;
  std::string command;  // kProcess
  std::string address;  // kTcp, "host:port"
  std::chrono::milliseconds timeout{10000};
  std::size_t batch_size = 64;
  // Requests sent before waiting on a reply.
  std::size_t max_in_flight = 4;
};

// Protocol client. The handshake runs in the constructor. When a Score call
// fails, the EndpointError's row() is the index (within that call) of the
// first row of the earliest unanswered request.
class EndpointScorer : public Scorer {
 public:
  EndpointScorer(const EndpointConfig& config, std::vector<Column> columns);
  EndpointScorer(std::unique_ptr<LineTransport> transport,
                 const EndpointConfig& config, std::vector<Column> columns);

  std::vector<double> Score(std::span<const std::vector<double>> rows) override;

 private:
  void Handshake();

  std::unique_ptr<LineTransport> transport_;
  EndpointConfig config_;
  std::vector<Column> columns_;
  std::int64_t next_id_ = 0;
};

struct PerturbationPolicy {
  enum class Mode { kLeaveOneOut, kMaskSampling };
  Mode mode = Mode::kLeaveOneOut;
  // kMaskSampling only.
  std::size_t num_samples = 0;    // 0 picks max(2 * (N + 1), 64)
  double mask_probability = 0.5;  // chance a feature is replaced
  double ridge = 1e-6;            // penalty on slopes; intercept is free
  std::uint64_t seed = 42;
  bool full_design = false;  // use all 2^N masks instead of sampling
};

// Replacement values: binary 0, ordinal column mean, categorical mode
// (lowest code on ties).
std::vector<double> ComputeBaseline(const FeatureTable& features);

struct Explanation {
  std::vector<double> contributions;
  double predicted_score = 0.0;
};

// Leave-one-out: c^i = f(x) - f(x with column i at baseline).
// Mask sampling: least-squares fit of f(x masked by z) on [1, z] with z in
// {0,1}^N (1 keeps the value); c^i is the slope of z_i.
// Throws DataError for an invalid policy and EndpointError on scorer
// failure (including non-finite scores).
Explanation ExplainSample(std::span<const double> row, Scorer& scorer,
                          const PerturbationPolicy& policy,
                          std::span<const double> baseline,
                          std::uint64_t row_seed);

// Row j uses seed policy.seed ^ j. Endpoint errors carry the 1-based row.
ContributionMatrix BuildContributionMatrix(const FeatureTable& features,
                                           Scorer& scorer,
                                           const PerturbationPolicy& policy,
                                           std::size_t rows_per_call = 16);

}  // namespace girp

#endif  // GIRP_LOCAL_EXPLAINER_H_
