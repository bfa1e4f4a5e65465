// Copyright 2026 The pasa-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PASA_POLICY_HPP_
#define PASA_POLICY_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pasa/env.hpp"

namespace pasa {

// ------------------------------------------------------------- features --

struct FeatureConfig {
  int hist_buckets = 8;

  void validate() const;
  bool operator==(const FeatureConfig&) const = default;
};

// State block: bias, session-kind flag, depth, session progress, queue size,
// current-paper relevance, last-step yield, productive-step ratio, then
// hashed keyword histograms of the query and of the current paper.
inline constexpr int kStateScalars = 8;
// Per-action block: mean and max target relevance, novelty fraction, novel
// count, max relevance among novel targets, spec/query overlap, repeat flag.
inline constexpr int kActionScalars = 7;

int state_dim(const FeatureConfig& cfg);
// One-hot(action type) ⊗ state block, then the per-action block.
int action_dim(const FeatureConfig& cfg);

// Non-owning view of per-action feature rows.
struct ActionRows {
  std::span<const double> data;
  std::size_t n_legal = 0;
  std::size_t dim = 0;

  std::span<const double> row(std::size_t i) const {
    return data.subspan(i * dim, dim);
  }
};

struct Features {
  std::vector<double> state;
  std::vector<double> actions;  // n_legal rows of action_dim, row-major
  std::size_t n_legal = 0;
  std::size_t dim = 0;

  std::span<const double> row(std::size_t i) const {
    return {actions.data() + i * dim, dim};
  }
  ActionRows rows() const { return {actions, n_legal, dim}; }
};

// Rows recorded in a transition's feature snapshot.
ActionRows rows_of(const Transition& t);

std::vector<double> state_features(const Episode& episode,
                                   const AgentState& state,
                                   const FeatureConfig& cfg);

Features featurize(const Episode& episode, const AgentState& state,
                   std::span<const Action> legal, const FeatureConfig& cfg);

// ---------------------------------------------------------------- models --

enum class ModelKind { kLinear, kMlp };
std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

struct HeadShape {
  ModelKind kind = ModelKind::kLinear;
  int in_dim = 0;
  int hidden = 0;  // used by kMlp only

  std::size_t n_params() const;
  bool operator==(const HeadShape&) const = default;
};

// Scalar-output map: w·x + b, or v·tanh(Wx + c) + b with one hidden layer.
class ScalarHead {
 public:
  ScalarHead() = default;
  explicit ScalarHead(HeadShape shape);

  const HeadShape& shape() const { return shape_; }
  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }

  double forward(std::span<const double> x) const;
  // grad += scale * d forward(x) / d params.
  void accumulate_grad(std::span<const double> x, double scale,
                       std::span<double> grad) const;

  // Every parameter uniform in [-scale, scale].
  void randomize(Rng& rng, double scale);

  bool operator==(const ScalarHead&) const = default;

 private:
  HeadShape shape_;
  std::vector<double> params_;
};

// θ: per-action score head over action feature rows.
struct PolicyParams {
  FeatureConfig features;
  ScalarHead head;

  static PolicyParams zeros(const FeatureConfig& fc, ModelKind kind,
                            int hidden = 16);
  bool operator==(const PolicyParams&) const = default;
};

// φ: state-value head over the state block.
struct ValueParams {
  FeatureConfig features;
  ScalarHead head;

  static ValueParams zeros(const FeatureConfig& fc, ModelKind kind,
                           int hidden = 16);
  bool operator==(const ValueParams&) const = default;
};

// Frozen, shareable copy of policy parameters (π_sft, π_old).
class PolicySnapshot {
 public:
  explicit PolicySnapshot(PolicyParams params)
      : params_(std::make_shared<const PolicyParams>(std::move(params))) {}
  const PolicyParams& params() const { return *params_; }

 private:
  std::shared_ptr<const PolicyParams> params_;
};

std::vector<double> action_scores(const PolicyParams& params,
                                  const ActionRows& rows);
// Softmax over per-action scores; NumericError on non-finite scores.
std::vector<double> softmax(std::span<const double> scores);
std::vector<double> action_dist(const PolicyParams& params,
                                const ActionRows& rows);

struct LogProbGrad {
  double logprob = 0.0;
  std::vector<double> grad;  // d log π(a|s) / dθ
};
LogProbGrad logprob_and_grad(const PolicyParams& params,
                             const ActionRows& rows, std::size_t action_index);
double logprob(const PolicyParams& params, const ActionRows& rows,
               std::size_t action_index);

double value(const ValueParams& params, std::span<const double> state);
std::vector<double> value_grad(const ValueParams& params,
                               std::span<const double> state);

// KL(p || q) for two distributions over the same support.
double kl_divergence(std::span<const double> p, std::span<const double> q);

std::size_t sample_action(std::span<const double> dist, Rng& rng);
std::size_t greedy_action(std::span<const double> dist);

// Chooser backed by a policy snapshot; samples or takes the argmax.
class PolicyChooser : public ActionChooser {
 public:
  PolicyChooser(PolicySnapshot policy, bool greedy = false)
      : policy_(std::move(policy)), greedy_(greedy) {}
  Choice choose(const Episode& episode, const AgentState& state,
                std::span<const Action> legal, Rng& rng,
                Transition* record) const override;

 private:
  PolicySnapshot policy_;
  bool greedy_;
};

// ------------------------------------------------------------ checkpoint --

struct Checkpoint {
  PolicyParams policy;
  ValueParams value;
  long step = 0;
};

// JSON object {model, dims, step, hist_buckets, policy: [...], value: [...]}.
std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace pasa

#endif  // PASA_POLICY_HPP_
