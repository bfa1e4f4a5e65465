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

#include "pasa/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "pasa/parallel.hpp"

namespace pasa {

// ---------------------------------------------------------------- configs --

double RewardConfig::cost(ActionType t) const {
  switch (t) {
    case ActionType::kSearch:
      return cost_search;
    case ActionType::kExpand:
      return cost_expand;
    case ActionType::kStop:
      break;
  }
  return cost_stop;
}

void RewardConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("alpha", "must be > 0");
  if (!(cost_search >= 0.0)) throw ConfigError("cost_search", "must be >= 0");
  if (!(cost_expand >= 0.0)) throw ConfigError("cost_expand", "must be >= 0");
  if (!(cost_stop >= 0.0)) throw ConfigError("cost_stop", "must be >= 0");
}

void PPOConfig::validate() const {
  if (!(gamma0 >= 0.0 && gamma0 <= 1.0))
    throw ConfigError("gamma0", "must be in [0, 1]");
  if (!(gamma1 >= 0.0 && gamma1 <= 1.0))
    throw ConfigError("gamma1", "must be in [0, 1]");
  if (!(beta >= 0.0)) throw ConfigError("beta", "must be >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("epsilon", "must be in (0, 1)");
  if (!(eta >= 0.0)) throw ConfigError("eta", "must be >= 0");
  if (!(learning_rate > 0.0))
    throw ConfigError("learning_rate", "must be > 0");
  if (epochs_per_step < 1) throw ConfigError("epochs_per_step", "must be >= 1");
  if (queries_per_step < 1)
    throw ConfigError("queries_per_step", "must be >= 1");
  if (expand_sessions_per_wave < 1)
    throw ConfigError("expand_sessions_per_wave", "must be >= 1");
  if (policy_freeze_steps < 0)
    throw ConfigError("policy_freeze_steps", "must be >= 0");
  if (total_steps < 1) throw ConfigError("total_steps", "must be >= 1");
}

// ---------------------------------------------------------------- rewards --

double reward(const Transition& transition, const Query& query,
              const QueueView& queue_before, const Corpus& corpus,
              const SelectorModel& selector, const RewardConfig& cfg) {
  int hits = 0;
  for (PaperId p : transition.new_papers)
    hits += indicator(selector, corpus, query, p, queue_before, cfg.indicator);
  return cfg.alpha * hits - cfg.cost(transition.action.type);
}

void fill_rewards(std::vector<Session>& sessions, const PaperQueue& queue,
                  const Query& query, const Corpus& corpus,
                  const SelectorModel& selector, const RewardConfig& cfg) {
  for (Session& s : sessions)
    for (Transition& t : s.transitions)
      t.reward = reward(t, query, queue.prefix(t.queue_size_before), corpus,
                        selector, cfg);
}

std::vector<double> session_returns(const Session& session,
                                    const BootstrapValue& bootstrap,
                                    const PPOConfig& cfg) {
  const auto& ts = session.transitions;
  std::vector<double> out(ts.size());
  double tail = 0.0;
  for (std::size_t i = ts.size(); i-- > 0;) {
    const Transition& t = ts[i];
    double spawned = 0.0;
    for (std::size_t j = 0; j < t.new_papers.size(); ++j)
      spawned += bootstrap(t, j);
    tail = t.reward + cfg.gamma1 * spawned + cfg.gamma0 * tail;
    const double log_ratio = t.logprob_old - t.logprob_sft;
    if (!std::isfinite(log_ratio))
      throw NumericError("non-finite log-ratio at session position " +
                         std::to_string(i));
    out[i] = tail - cfg.beta * log_ratio;
  }
  return out;
}

std::vector<double> advantages(std::span<const double> returns,
                               std::span<const double> values_old) {
  if (returns.size() != values_old.size())
    throw ContractViolation("advantages: length mismatch");
  std::vector<double> out(returns.size());
  for (std::size_t i = 0; i < returns.size(); ++i)
    out[i] = returns[i] - values_old[i];
  return out;
}

// ------------------------------------------------------------- PPO losses --

std::vector<const Transition*> batch_samples(const TrainBatch& batch) {
  std::vector<const Transition*> out;
  for (const Session& s : batch.sessions)
    for (const Transition& t : s.transitions) out.push_back(&t);
  return out;
}

namespace {

struct SampleTerms {
  double surrogate = 0.0;
  double value_loss = 0.0;
  bool clipped = false;
  std::vector<double> d_surrogate;  // d surrogate / dθ
  std::vector<double> d_value;      // d value-loss term / dφ
};

SampleTerms sample_terms(const Transition& t, double adv,
                         const PolicyParams& policy, const ValueParams& value,
                         const PPOConfig& cfg, std::size_t index) {
  SampleTerms out;
  LogProbGrad lg = logprob_and_grad(policy, rows_of(t), t.action_index);
  const double ratio = std::exp(lg.logprob - t.logprob_old);
  if (!std::isfinite(ratio))
    throw NumericError("non-finite probability ratio at sample " +
                       std::to_string(index));
  const double unclipped = ratio * adv;
  const double clipped =
      std::clamp(ratio, 1.0 - cfg.epsilon, 1.0 + cfg.epsilon) * adv;
  out.d_surrogate.assign(lg.grad.size(), 0.0);
  if (unclipped <= clipped) {
    out.surrogate = unclipped;
    for (std::size_t k = 0; k < lg.grad.size(); ++k)
      out.d_surrogate[k] = adv * ratio * lg.grad[k];
  } else {
    // Clipped branch: constant in θ.
    out.surrogate = clipped;
    out.clipped = true;
  }

  const double v = pasa::value(value, t.state_features);
  const double v_clip =
      std::clamp(v, t.value_old - cfg.epsilon, t.value_old + cfg.epsilon);
  const double e_raw = (t.ret - v) * (t.ret - v);
  const double e_clip = (t.ret - v_clip) * (t.ret - v_clip);
  out.d_value.assign(value.head.params().size(), 0.0);
  if (e_raw >= e_clip) {
    out.value_loss = e_raw;
    value.head.accumulate_grad(t.state_features, -2.0 * (t.ret - v),
                               out.d_value);
  } else {
    // Only reachable with v outside the clip band, where v_clip is constant.
    out.value_loss = e_clip;
  }
  return out;
}

std::vector<double> batch_advantages(
    const std::vector<const Transition*>& samples, const PPOConfig& cfg) {
  std::vector<double> adv(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    adv[i] = samples[i]->advantage;
  if (cfg.normalize_advantages && adv.size() > 1) {
    const double mean =
        std::accumulate(adv.begin(), adv.end(), 0.0) / adv.size();
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / adv.size());
    for (double& a : adv) a = (a - mean) / (sd + 1e-8);
  }
  return adv;
}

// Ordered reduction shared by the serial and parallel paths.
PPOLosses reduce_terms(const std::vector<SampleTerms>& terms,
                       const PolicyParams& policy, const ValueParams& value,
                       const PPOConfig& cfg) {
  PPOLosses out;
  out.grad_policy.assign(policy.head.params().size(), 0.0);
  out.grad_value.assign(value.head.params().size(), 0.0);
  const double n = static_cast<double>(terms.size());
  std::size_t clipped = 0;
  double surr_sum = 0.0, value_sum = 0.0;
  for (const SampleTerms& s : terms) {
    surr_sum += s.surrogate;
    value_sum += s.value_loss;
    clipped += s.clipped ? 1 : 0;
    for (std::size_t k = 0; k < s.d_surrogate.size(); ++k)
      out.grad_policy[k] -= s.d_surrogate[k] / n;
    for (std::size_t k = 0; k < s.d_value.size(); ++k)
      out.grad_value[k] += cfg.eta * s.d_value[k] / n;
    out.surrogate.push_back(s.surrogate);
    out.value_loss_terms.push_back(s.value_loss);
  }
  out.policy_loss = -surr_sum / n;
  out.value_loss = value_sum / n;
  out.rl_loss = out.policy_loss + cfg.eta * out.value_loss;
  out.clip_fraction = static_cast<double>(clipped) / n;
  return out;
}

void check_loss_inputs(const std::vector<const Transition*>& samples) {
  if (samples.empty()) throw ContractViolation("ppo_losses: empty batch");
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i]->action_features.empty() ||
        samples[i]->state_features.empty())
      throw ContractViolation("ppo_losses: sample " + std::to_string(i) +
                              " lacks a feature snapshot");
}

}  // namespace

PPOLosses ppo_losses(const TrainBatch& batch, const PolicyParams& policy,
                     const ValueParams& value, const PPOConfig& cfg) {
  const auto samples = batch_samples(batch);
  check_loss_inputs(samples);
  const auto adv = batch_advantages(samples, cfg);
  std::vector<SampleTerms> terms(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    terms[i] = sample_terms(*samples[i], adv[i], policy, value, cfg, i);
  });
  return reduce_terms(terms, policy, value, cfg);
}

PPOLosses ppo_losses_serial(const TrainBatch& batch, const PolicyParams& policy,
                            const ValueParams& value, const PPOConfig& cfg) {
  const auto samples = batch_samples(batch);
  check_loss_inputs(samples);
  const auto adv = batch_advantages(samples, cfg);
  std::vector<SampleTerms> terms;
  terms.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    terms.push_back(sample_terms(*samples[i], adv[i], policy, value, cfg, i));
  return reduce_terms(terms, policy, value, cfg);
}

// -------------------------------------------------------------- imitation --

std::vector<int> select_demo_sections(const Paper& paper, const Query& query,
                                      double other_prob, Rng& rng) {
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(paper.sections.size()); ++j) {
    const auto& cited = paper.sections[j].cited;
    const bool hits_answer =
        std::any_of(cited.begin(), cited.end(),
                    [&](PaperId p) { return query.is_answer(p); });
    if (hits_answer || uniform01(rng) < other_prob) out.push_back(j);
  }
  return out;
}

namespace {

std::size_t index_in(const std::vector<Action>& legal, const Action& a) {
  const auto it = std::find(legal.begin(), legal.end(), a);
  if (it == legal.end())
    throw ContractViolation("demo action " + to_string(a) + " is not legal");
  return static_cast<std::size_t>(it - legal.begin());
}

// Plays a scripted session, recording one demo per step.
void play_demo_session(Episode& ep, AgentState state,
                       const std::vector<Action>& script,
                       const FeatureConfig& fc, DemoSet& out) {
  const std::size_t cap =
      static_cast<std::size_t>(ep.limits().max_actions_per_session - 1);
  std::vector<Action> actions;
  for (const Action& a : script) {
    if (actions.size() >= cap) break;
    actions.push_back(a);
  }
  actions.push_back(Action::stop());
  for (const Action& a : actions) {
    const auto legal = ep.legal_actions(state);
    const Action act =
        std::find(legal.begin(), legal.end(), a) == legal.end() ? Action::stop()
                                                                : a;
    out.push_back({featurize(ep, state, legal, fc), index_in(legal, act)});
    if (ep.step(state, act).session_done) break;
  }
}

}  // namespace

DemoSet make_demos(const Corpus& corpus, std::span<const Query> queries,
                   std::uint64_t seed, const DemoConfig& cfg) {
  DemoSet demos;
  for (const Query& q : queries) {
    Rng rng(derive_seed(seed, 0xD0, static_cast<std::uint64_t>(q.id)));
    Episode ep(corpus, q, cfg.limits);

    std::vector<Action> searches;
    for (int i = 0; i < static_cast<int>(q.candidate_searches.size()); ++i) {
      const auto& res = ep.search_results(i);
      if (std::any_of(res.begin(), res.end(),
                      [&](PaperId p) { return q.is_answer(p); }))
        searches.push_back(Action::search(i));
    }
    play_demo_session(ep, ep.query_state(), searches, cfg.features, demos);

    auto pool = ep.queue().entries();
    const std::size_t take = std::min<std::size_t>(
        pool.size(), static_cast<std::size_t>(cfg.expand_papers_per_query));
    for (std::size_t k = 0; k < take; ++k)
      std::swap(pool[k], pool[k + uniform_index(rng, pool.size() - k)]);
    for (std::size_t k = 0; k < take; ++k) {
      const Paper& paper = corpus.paper(pool[k].id);
      std::vector<Action> script;
      for (int j : select_demo_sections(paper, q, cfg.other_section_prob, rng))
        script.push_back(Action::expand(j));
      play_demo_session(ep, ep.paper_state(pool[k].id, pool[k].depth), script,
                        cfg.features, demos);
    }
  }
  return demos;
}

namespace {

struct DemoTerms {
  double nll = 0.0;
  std::vector<double> grad;
};

DemoTerms demo_terms(const PolicyParams& params, const Demo& d) {
  LogProbGrad lg = logprob_and_grad(params, d.features.rows(), d.action_index);
  return {-lg.logprob, std::move(lg.grad)};
}

NllGrad reduce_demo_terms(const std::vector<DemoTerms>& terms,
                          std::size_t n_params) {
  NllGrad out;
  out.grad.assign(n_params, 0.0);
  const double n = static_cast<double>(terms.size());
  for (const DemoTerms& t : terms) {
    out.nll += t.nll;
    for (std::size_t k = 0; k < n_params; ++k) out.grad[k] -= t.grad[k] / n;
  }
  out.nll /= n;
  return out;
}

}  // namespace

NllGrad nll_and_grad(const PolicyParams& params, const DemoSet& demos) {
  if (demos.empty()) throw ContractViolation("no demos");
  std::vector<DemoTerms> terms(demos.size());
  parallel_for(demos.size(),
               [&](std::size_t i) { terms[i] = demo_terms(params, demos[i]); });
  return reduce_demo_terms(terms, params.head.params().size());
}

NllGrad nll_and_grad_serial(const PolicyParams& params, const DemoSet& demos) {
  if (demos.empty()) throw ContractViolation("no demos");
  std::vector<DemoTerms> terms;
  terms.reserve(demos.size());
  for (const Demo& d : demos) terms.push_back(demo_terms(params, d));
  return reduce_demo_terms(terms, params.head.params().size());
}

double mean_nll(const PolicyParams& params, const DemoSet& demos) {
  if (demos.empty()) throw ContractViolation("no demos");
  double s = 0.0;
  for (const Demo& d : demos)
    s -= logprob(params, d.features.rows(), d.action_index);
  return s / static_cast<double>(demos.size());
}

BCResult bc_train(const DemoSet& demos, PolicyParams init, int epochs,
                  double lr) {
  if (demos.empty()) throw ContractViolation("bc_train: demo set is empty");
  if (epochs < 0) throw ConfigError("epochs", "must be >= 0");
  std::vector<double> history;
  for (int e = 0; e < epochs; ++e) {
    const NllGrad g = nll_and_grad(init, demos);
    history.push_back(g.nll);
    auto p = init.head.params();
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= lr * g.grad[k];
  }
  history.push_back(mean_nll(init, demos));
  return {PolicySnapshot(std::move(init)), std::move(history)};
}

// ----------------------------------------------------------- PPO sampling --

namespace {

// Fills π_sft log-probs, V_old and the spawned-session snapshots after each
// step.
class SamplingRecorder : public StepRecorder {
 public:
  SamplingRecorder(const PolicyParams& sft, const ValueParams& value)
      : sft_(sft), value_(value) {}

  void after_step(const Episode& ep, const AgentState& before,
                  Transition& t) const override {
    t.logprob_sft = logprob(sft_, rows_of(t), t.action_index);
    t.value_old = pasa::value(value_, t.state_features);
    t.spawn_features.clear();
    for (PaperId p : t.new_papers)
      t.spawn_features.push_back(state_features(
          ep, ep.paper_state(p, before.depth + 1), value_.features));
  }

 private:
  const PolicyParams& sft_;
  const ValueParams& value_;
};

struct QueryRollout {
  std::vector<Session> sessions;
  bool short_batch = false;
};

std::vector<PaperId> papers_found(const std::vector<Session>& sessions,
                                  std::size_t from) {
  std::vector<PaperId> out;
  for (std::size_t s = from; s < sessions.size(); ++s)
    for (const Transition& t : sessions[s].transitions)
      out.insert(out.end(), t.new_papers.begin(), t.new_papers.end());
  return out;
}

// Search session, then two expand waves over uniformly chosen papers.
QueryRollout sample_query(const TrainSetup& setup, const Query& q,
                          const PolicyParams& policy, const PolicyParams& sft,
                          const ValueParams& value, Rng& rng) {
  Episode ep(*setup.corpus, q, setup.limits);
  const PolicyChooser chooser{PolicySnapshot(policy)};
  const SamplingRecorder recorder(sft, value);
  QueryRollout out;
  out.sessions.push_back(
      run_session(chooser, ep, ep.query_state(), rng, &recorder));

  const std::size_t wave_size =
      static_cast<std::size_t>(setup.ppo.expand_sessions_per_wave);
  std::vector<PaperId> pool = papers_found(out.sessions, 0);
  for (int wave = 0; wave < 2; ++wave) {
    if (pool.empty()) {
      out.short_batch = true;
      break;
    }
    const std::size_t take = std::min(wave_size, pool.size());
    out.short_batch |= take < wave_size;
    for (std::size_t k = 0; k < take; ++k)
      std::swap(pool[k], pool[k + uniform_index(rng, pool.size() - k)]);
    const std::size_t first = out.sessions.size();
    for (std::size_t k = 0; k < take; ++k) {
      const PaperId p = pool[k];
      const int depth = ep.queue().entries()[ep.queue().position(p)].depth;
      out.sessions.push_back(run_session(
          chooser, ep, ep.paper_state(p, depth), rng, &recorder));
    }
    pool = papers_found(out.sessions, first);
  }

  fill_rewards(out.sessions, ep.queue(), q, *setup.corpus, setup.selector,
               setup.reward);
  const BootstrapValue bootstrap = [&](const Transition& t, std::size_t j) {
    return pasa::value(value, t.spawn_features[j]);
  };
  for (Session& s : out.sessions) {
    const auto rets = session_returns(s, bootstrap, setup.ppo);
    for (std::size_t i = 0; i < rets.size(); ++i) {
      s.transitions[i].ret = rets[i];
      s.transitions[i].advantage = rets[i] - s.transitions[i].value_old;
    }
  }
  return out;
}

std::vector<std::size_t> pick_queries(const TrainSetup& setup,
                                      std::uint64_t seed, int step) {
  const std::size_t want =
      static_cast<std::size_t>(setup.ppo.queries_per_step);
  if (setup.queries.size() < want)
    throw ContractViolation("sample_step: need at least " +
                            std::to_string(want) + " queries, have " +
                            std::to_string(setup.queries.size()));
  Rng rng(derive_seed(seed, 0x5A, static_cast<std::uint64_t>(step)));
  std::vector<std::size_t> idx(setup.queries.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t k = 0; k < want; ++k)
    std::swap(idx[k], idx[k + uniform_index(rng, idx.size() - k)]);
  idx.resize(want);
  return idx;
}

TrainBatch assemble(const TrainSetup& setup, std::vector<QueryRollout> parts,
                    const std::vector<std::size_t>& picks,
                    const PolicyParams& policy, const PolicyParams& sft) {
  TrainBatch batch;
  double kl_sum = 0.0;
  std::size_t n_states = 0, n_actions = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    batch.query_ids.push_back(setup.queries[picks[k]].id);
    batch.short_batch |= parts[k].short_batch;
    for (Session& s : parts[k].sessions) {
      for (const Transition& t : s.transitions) {
        const auto p = action_dist(policy, rows_of(t));
        const auto q = action_dist(sft, rows_of(t));
        kl_sum += kl_divergence(p, q);
        ++n_states;
        n_actions += t.action.type != ActionType::kStop ? 1 : 0;
      }
      batch.sessions.push_back(std::move(s));
    }
  }
  batch.mean_kl = n_states ? kl_sum / static_cast<double>(n_states) : 0.0;
  batch.mean_actions =
      static_cast<double>(n_actions) / static_cast<double>(parts.size());
  return batch;
}

void check_setup(const TrainSetup& setup, const PolicyParams& policy,
                 const ValueParams& value) {
  if (setup.corpus == nullptr) throw ContractViolation("setup has no corpus");
  if (!(policy.features == value.features))
    throw ContractViolation("policy and value use different feature configs");
}

}  // namespace

TrainBatch sample_step(const TrainSetup& setup, const PolicyParams& policy,
                       const PolicyParams& sft, const ValueParams& value,
                       std::uint64_t seed, int step) {
  check_setup(setup, policy, value);
  const auto picks = pick_queries(setup, seed, step);
  std::vector<QueryRollout> parts(picks.size());
  parallel_for(picks.size(), [&](std::size_t k) {
    Rng rng(derive_seed(seed, 0x5B, static_cast<std::uint64_t>(step), k));
    parts[k] =
        sample_query(setup, setup.queries[picks[k]], policy, sft, value, rng);
  });
  return assemble(setup, std::move(parts), picks, policy, sft);
}

TrainBatch sample_step_serial(const TrainSetup& setup,
                              const PolicyParams& policy,
                              const PolicyParams& sft,
                              const ValueParams& value, std::uint64_t seed,
                              int step) {
  check_setup(setup, policy, value);
  const auto picks = pick_queries(setup, seed, step);
  std::vector<QueryRollout> parts;
  for (std::size_t k = 0; k < picks.size(); ++k) {
    Rng rng(derive_seed(seed, 0x5B, static_cast<std::uint64_t>(step), k));
    parts.push_back(
        sample_query(setup, setup.queries[picks[k]], policy, sft, value, rng));
  }
  return assemble(setup, std::move(parts), picks, policy, sft);
}

// -------------------------------------------------------------- PPO loop --

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

TrainResult ppo_train(const TrainSetup& setup, const PolicySnapshot& sft,
                      ValueParams value_init, std::uint64_t seed,
                      const TrainHooks& hooks) {
  setup.ppo.validate();
  setup.reward.validate();
  setup.selector.validate();
  const PPOConfig& cfg = setup.ppo;

  TrainResult result{sft.params(), std::move(value_init), {}};
  Checkpoint last_good{result.policy, result.value, 0};

  for (int step = 1; step <= cfg.total_steps; ++step) {
    const bool joint = step > cfg.policy_freeze_steps;
    TrainBatch batch;
    try {
      batch = sample_step(setup, result.policy, sft.params(), result.value,
                          seed, step);
    } catch (const NumericError& e) {
      throw TrainingDiverged(
          "step " + std::to_string(step) + ": " + e.what(), last_good);
    }

    StepMetrics m;
    m.step = step;
    m.phase = joint ? "joint" : "value-warmup";
    m.mean_kl = batch.mean_kl;
    m.mean_actions = batch.mean_actions;
    double ret_sum = 0.0;
    for (const Session& s : batch.sessions) ret_sum += s.transitions.front().ret;
    m.mean_return = ret_sum / static_cast<double>(batch.sessions.size());

    for (int epoch = 0; epoch < cfg.epochs_per_step; ++epoch) {
      PPOLosses loss;
      try {
        loss = ppo_losses(batch, result.policy, result.value, cfg);
      } catch (const NumericError& e) {
        throw TrainingDiverged(
            "step " + std::to_string(step) + ": " + e.what(), last_good);
      }
      if (!std::isfinite(loss.rl_loss) || !all_finite(loss.grad_policy) ||
          !all_finite(loss.grad_value))
        throw TrainingDiverged("non-finite loss at step " +
                                   std::to_string(step),
                               last_good);
      if (epoch == 0) {
        m.policy_loss = loss.policy_loss;
        m.value_loss = loss.value_loss;
      }
      auto phi = result.value.head.params();
      for (std::size_t k = 0; k < phi.size(); ++k)
        phi[k] -= cfg.learning_rate * loss.grad_value[k];
      if (joint) {
        auto theta = result.policy.head.params();
        for (std::size_t k = 0; k < theta.size(); ++k)
          theta[k] -= cfg.learning_rate * loss.grad_policy[k];
      }
    }
    if (!all_finite(result.policy.head.params()) ||
        !all_finite(result.value.head.params()))
      throw TrainingDiverged(
          "non-finite parameters at step " + std::to_string(step), last_good);

    last_good = {result.policy, result.value, step};
    result.metrics.push_back(m);
    if (hooks.on_step) hooks.on_step(m, result.policy, result.value);
  }
  return result;
}

double mean_policy_kl(const TrainSetup& setup, const PolicyParams& policy,
                      const PolicyParams& sft, std::uint64_t seed) {
  const ValueParams zero_value =
      ValueParams::zeros(policy.features, ModelKind::kLinear);
  std::vector<double> kl(setup.queries.size(), 0.0);
  std::vector<std::size_t> count(setup.queries.size(), 0);
  parallel_for(setup.queries.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, 0x6C, static_cast<std::uint64_t>(i)));
    const QueryRollout r =
        sample_query(setup, setup.queries[i], policy, sft, zero_value, rng);
    for (const Session& s : r.sessions) {
      for (const Transition& t : s.transitions) {
        kl[i] += kl_divergence(action_dist(policy, rows_of(t)),
                               action_dist(sft, rows_of(t)));
        ++count[i];
      }
    }
  });
  const double total = std::accumulate(kl.begin(), kl.end(), 0.0);
  const std::size_t n = std::accumulate(count.begin(), count.end(),
                                        std::size_t{0});
  return n ? total / static_cast<double>(n) : 0.0;
}

void write_metrics_csv(std::ostream& out,
                       const std::vector<StepMetrics>& metrics) {
  out << "step,phase,mean_return,mean_kl,mean_actions,policy_loss,value_loss\n";
  char buf[256];
  for (const StepMetrics& m : metrics) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  m.step, m.phase.c_str(), m.mean_return, m.mean_kl,
                  m.mean_actions, m.policy_loss, m.value_loss);
    out << buf;
  }
}

}  // namespace pasa
