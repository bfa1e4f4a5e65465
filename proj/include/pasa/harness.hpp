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

#ifndef PASA_HARNESS_HPP_
#define PASA_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pasa/corpus.hpp"
#include "pasa/env.hpp"
#include "pasa/policy.hpp"
#include "pasa/selector.hpp"
#include "pasa/trainer.hpp"

namespace pasa {

// ---------------------------------------------------------------- metrics --

// |top-k ∩ answers| / |answers|. ContractViolation on empty answers or k < 0.
double recall_at_k(std::span<const PaperId> ranked,
                   std::span<const PaperId> answers, int k);

// Queue ids ordered by descending score; equal scores keep queue order.
std::vector<PaperId> rank_by_score(std::span<const PaperId> queue,
                                   std::span<const double> scores);

struct ActionCounts {
  long search = 0;
  long expand = 0;
  long stop = 0;
  long sessions = 0;

  long non_stop() const { return search + expand; }
};

struct QueryEval {
  std::int64_t query_id = 0;
  double crawler_recall = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::map<int, double> recall_at_k;
  std::size_t queue_size = 0;
  std::size_t selected = 0;
  ActionCounts actions;
  bool truncated = false;
};

using SelectFn = std::function<Decision(PaperId)>;

// Metrics for one final queue. The decision function plays the Selector.
QueryEval score_queue(std::span<const PaperId> queue, const Query& query,
                      const SelectFn& decide, std::span<const int> ks);

struct EvalResult {
  double crawler_recall = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::map<int, double> recall_at_k;
  double mean_actions = 0.0;  // Search + Expand per query
  ActionCounts actions;       // totals
  std::vector<QueryEval> per_query;
};

// Unweighted means over queries.
EvalResult aggregate(std::vector<QueryEval> per_query);

struct EvalOptions {
  std::vector<int> ks = {20, 50, 100};
  bool greedy = false;
  // When set, rewards are filled on the kept rollouts under this config.
  const RewardConfig* reward = nullptr;
  bool keep_rollouts = false;
};

struct Rollout {
  std::int64_t query_id = 0;
  std::vector<PaperId> queue;  // insertion order
  std::vector<Session> sessions;
};

// Per query: run_crawler with rng seeded from (seed, query id, run), then
// score the final queue. Parallel over queries.
EvalResult evaluate(const PolicySnapshot& policy, const SelectorModel& selector,
                    const Corpus& corpus, std::span<const Query> queries,
                    const EnvLimits& limits, std::uint64_t seed,
                    const EvalOptions& opts = {},
                    std::vector<Rollout>* rollouts = nullptr);
// Serial reference.
EvalResult evaluate_serial(const PolicySnapshot& policy,
                           const SelectorModel& selector, const Corpus& corpus,
                           std::span<const Query> queries,
                           const EnvLimits& limits, std::uint64_t seed,
                           const EvalOptions& opts = {});

// Union of n_runs rollout queues per query (first-seen order), then scored as
// in evaluate. Run 0 uses the same streams as evaluate.
EvalResult ensemble_eval(const PolicySnapshot& policy,
                         const SelectorModel& selector, const Corpus& corpus,
                         std::span<const Query> queries,
                         const EnvLimits& limits, int n_runs,
                         std::uint64_t seed, const EvalOptions& opts = {});

void write_eval_csv(std::ostream& out, const EvalResult& result);

// ------------------------------------------------------------- pipelines --

struct ModelConfig {
  ModelKind kind = ModelKind::kLinear;
  int hidden = 16;
  FeatureConfig features;
};

struct BCConfig {
  int queries = 40;  // demos come from the first n training queries
  int epochs = 30;
  double learning_rate = 1.0;
  DemoConfig demo;
};

struct Experiment {
  const Corpus* corpus = nullptr;
  std::span<const Query> train_queries;
  std::span<const Query> eval_queries;
  SelectorModel selector;
  RewardConfig reward;
  PPOConfig ppo;
  EnvLimits limits;
  ModelConfig model;
  BCConfig bc;
  EvalOptions eval;
  std::uint64_t train_seed = 1;
  std::uint64_t eval_seed = 2;
  std::vector<double> alphas = {0.5, 1.0, 1.5, 2.0};
  std::vector<double> costs = {0.0, 0.05, 0.1, 0.2};
};

BCResult train_sft(const Experiment& ex);

struct VariantOverrides {
  RewardConfig reward;
  PPOConfig ppo;
  EnvLimits limits;
};
VariantOverrides base_overrides(const Experiment& ex);

TrainResult train_ppo(const Experiment& ex, const PolicySnapshot& sft,
                      const VariantOverrides& v, const TrainHooks& hooks = {});

inline const std::vector<std::string>& ablation_variants() {
  static const std::vector<std::string> names = {
      "full", "no-expand", "no-rl", "exact-set-reward", "alpha-sweep",
      "cost-sweep"};
  return names;
}

struct AblationRow {
  std::string variant;
  std::string setting;  // e.g. "alpha=1.5"
  EvalResult eval;
  double final_kl = 0.0;
};

// Trains (where needed) and evaluates each variant from one shared π_sft
// under shared seeds. UsageError on unknown variant names.
std::vector<AblationRow> ablate(const Experiment& ex,
                                const std::vector<std::string>& variants);
std::vector<AblationRow> ablate(const Experiment& ex,
                                const std::vector<std::string>& variants,
                                const PolicySnapshot& sft);

void write_ablation_csv(std::ostream& out,
                        const std::vector<AblationRow>& rows,
                        std::span<const int> ks);

}  // namespace pasa

#endif  // PASA_HARNESS_HPP_
