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

#ifndef PASA_TRAINER_HPP_
#define PASA_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pasa/corpus.hpp"
#include "pasa/env.hpp"
#include "pasa/policy.hpp"
#include "pasa/selector.hpp"

namespace pasa {

struct RewardConfig {
  double alpha = 1.5;
  double cost_search = 0.1;
  double cost_expand = 0.1;
  double cost_stop = 0.0;
  IndicatorMode indicator = IndicatorMode::kSelectorOrAnswer;

  double cost(ActionType t) const;
  void validate() const;
};

struct PPOConfig {
  double gamma0 = 1.0;  // in-session discount
  double gamma1 = 0.1;  // across-session discount
  double beta = 0.1;    // KL coefficient
  double epsilon = 0.2;
  double eta = 10.0;  // value-loss weight
  double learning_rate = 1e-6;
  int epochs_per_step = 2;
  int queries_per_step = 4;
  int expand_sessions_per_wave = 6;
  int policy_freeze_steps = 50;
  int total_steps = 250;
  bool normalize_advantages = false;

  void validate() const;
};

// r = α · Σ_i I(q, p_i, t) − c(a_t), with the queue as it stood before the
// action.
double reward(const Transition& transition, const Query& query,
              const QueueView& queue_before, const Corpus& corpus,
              const SelectorModel& selector, const RewardConfig& cfg);

// Fills every transition's reward from the final queue of the rollout.
void fill_rewards(std::vector<Session>& sessions, const PaperQueue& queue,
                  const Query& query, const Corpus& corpus,
                  const SelectorModel& selector, const RewardConfig& cfg);

// V̂_φ(S_{q+p_j}) for the j-th paper appended by a transition.
using BootstrapValue = std::function<double(const Transition&, std::size_t)>;

// In-session discounted sum of rewards plus γ₁-weighted bootstrap values of
// spawned sessions, minus β·(log π_old − log π_sft) at position t only.
std::vector<double> session_returns(const Session& session,
                                    const BootstrapValue& bootstrap,
                                    const PPOConfig& cfg);

std::vector<double> advantages(std::span<const double> returns,
                               std::span<const double> values_old);

struct TrainBatch {
  std::vector<Session> sessions;
  bool short_batch = false;  // some wave had fewer papers than requested
  std::vector<std::int64_t> query_ids;
  double mean_kl = 0.0;        // KL(π_old || π_sft) over sampled states
  double mean_actions = 0.0;   // Search+Expand actions per query
};

// Flattened view of a batch for loss computation.
std::vector<const Transition*> batch_samples(const TrainBatch& batch);

struct PPOLosses {
  double policy_loss = 0.0;  // −mean(min(ρÂ, clip(ρ)Â))
  double value_loss = 0.0;   // mean(max((R̂−V)², (R̂−V_clip)²))
  double rl_loss = 0.0;      // policy_loss + η·value_loss
  std::vector<double> grad_policy;
  std::vector<double> grad_value;
  std::vector<double> surrogate;         // per sample
  std::vector<double> value_loss_terms;  // per sample
  double clip_fraction = 0.0;
};

// Parallel over samples; reduction in sample order.
PPOLosses ppo_losses(const TrainBatch& batch, const PolicyParams& policy,
                     const ValueParams& value, const PPOConfig& cfg);
// Serial reference.
PPOLosses ppo_losses_serial(const TrainBatch& batch, const PolicyParams& policy,
                            const ValueParams& value, const PPOConfig& cfg);

// ------------------------------------------------------------- imitation --

struct Demo {
  Features features;
  std::size_t action_index = 0;
};
using DemoSet = std::vector<Demo>;

struct DemoConfig {
  int expand_papers_per_query = 6;
  double other_section_prob = 0.10;
  EnvLimits limits;
  FeatureConfig features;
};

// Sections citing at least one answer always; others with probability p.
std::vector<int> select_demo_sections(const Paper& paper, const Query& query,
                                      double other_prob, Rng& rng);

DemoSet make_demos(const Corpus& corpus, std::span<const Query> queries,
                   std::uint64_t seed, const DemoConfig& cfg = {});

double mean_nll(const PolicyParams& params, const DemoSet& demos);

struct NllGrad {
  double nll = 0.0;
  std::vector<double> grad;  // d mean NLL / dθ
};
// Parallel over demos; reduction in demo order.
NllGrad nll_and_grad(const PolicyParams& params, const DemoSet& demos);
NllGrad nll_and_grad_serial(const PolicyParams& params, const DemoSet& demos);

struct BCResult {
  PolicySnapshot policy;
  std::vector<double> nll_per_epoch;  // entry 0 is before any update
};

// Full-batch gradient descent on mean negative log-likelihood.
BCResult bc_train(const DemoSet& demos, PolicyParams init, int epochs,
                  double lr);

// ---------------------------------------------------------------- PPO ----

struct TrainSetup {
  const Corpus* corpus = nullptr;
  std::span<const Query> queries;
  SelectorModel selector;
  RewardConfig reward;
  PPOConfig ppo;
  EnvLimits limits;
};

// One step of the session sampling pattern: per query one search session,
// then two waves of expand sessions over uniformly chosen papers from the
// previous wave's results. Records π_old, π_sft and V_old quantities and
// fills rewards, returns and advantages.
TrainBatch sample_step(const TrainSetup& setup, const PolicyParams& policy,
                       const PolicyParams& sft, const ValueParams& value,
                       std::uint64_t seed, int step);
TrainBatch sample_step_serial(const TrainSetup& setup,
                              const PolicyParams& policy,
                              const PolicyParams& sft,
                              const ValueParams& value, std::uint64_t seed,
                              int step);

struct StepMetrics {
  int step = 0;
  std::string phase;  // "value-warmup" or "joint"
  double mean_return = 0.0;
  double mean_kl = 0.0;
  double mean_actions = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
};

struct TrainResult {
  PolicyParams policy;
  ValueParams value;
  std::vector<StepMetrics> metrics;
};

class TrainingDiverged : public NumericError {
 public:
  TrainingDiverged(const std::string& what, Checkpoint last_good)
      : NumericError(what), last_good_(std::move(last_good)) {}
  const Checkpoint& last_good() const { return last_good_; }

 private:
  Checkpoint last_good_;
};

struct TrainHooks {
  // Called after every step with the updated parameters.
  std::function<void(const StepMetrics&, const PolicyParams&,
                     const ValueParams&)>
      on_step;
};

// Value-only updates for the first policy_freeze_steps steps, then joint.
TrainResult ppo_train(const TrainSetup& setup, const PolicySnapshot& sft,
                      ValueParams value_init, std::uint64_t seed,
                      const TrainHooks& hooks = {});

// Mean KL(π || π_sft) over states visited by sampling π with the training session pattern
// on the given queries.
double mean_policy_kl(const TrainSetup& setup, const PolicyParams& policy,
                      const PolicyParams& sft, std::uint64_t seed);

void write_metrics_csv(std::ostream& out,
                       const std::vector<StepMetrics>& metrics);

}  // namespace pasa

#endif  // PASA_TRAINER_HPP_
