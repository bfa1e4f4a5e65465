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

#include <cmath>
#include <set>

#include "doctest.h"
#include "pasa/trainer.hpp"
#include "test_util.hpp"

using namespace pasa;
using testing::tiny_corpus;
using testing::tiny_query;

namespace {

const FeatureConfig kSmall{4};

Transition make_transition(ActionType type, std::vector<PaperId> papers) {
  Transition t;
  t.action = {type, 0};
  t.new_papers = std::move(papers);
  return t;
}

// Single-sample batch over two legal actions with random features.
TrainBatch one_sample_batch(const PolicyParams& policy, double ratio,
                            double adv, Rng& rng) {
  Transition t;
  t.n_legal = 2;
  const std::size_t dim = action_dim(kSmall);
  t.action_features.resize(2 * dim);
  for (double& x : t.action_features) x = uniform01(rng) - 0.5;
  t.state_features.resize(state_dim(kSmall));
  for (double& x : t.state_features) x = uniform01(rng) - 0.5;
  t.action_index = 0;
  t.logprob_old = logprob(policy, rows_of(t), 0) - std::log(ratio);
  t.value_old = 0.0;
  t.ret = adv;
  t.advantage = adv;
  TrainBatch b;
  Session s;
  s.transitions.push_back(t);
  b.sessions.push_back(s);
  return b;
}

struct Fixture {
  Corpus corpus;
  std::vector<Query> queries;
  Fixture() {
    CorpusConfig cc;
    cc.n_papers = 600;
    corpus = gen_corpus(cc, 51);
    queries = gen_queries(corpus, 12, 52);
  }
  TrainSetup setup() const {
    TrainSetup s{&corpus, queries, SelectorModel::noisy(0.05, 0.0, 3), {}, {}, {}};
    return s;
  }
};

PolicyParams random_policy(std::uint64_t seed) {
  Rng rng(seed);
  PolicyParams p = PolicyParams::zeros({}, ModelKind::kLinear);
  p.head.randomize(rng, 0.3);
  return p;
}

}  // namespace

TEST_CASE("reward examples") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  const SelectorModel sel = SelectorModel::exact();
  const RewardConfig cfg;
  PaperQueue queue;
  CHECK(reward(make_transition(ActionType::kSearch, {1, 2}), q, queue.view(), c,
               sel, cfg) == doctest::Approx(2.9).epsilon(1e-15));
  CHECK(reward(make_transition(ActionType::kStop, {}), q, queue.view(), c, sel,
               cfg) == 0.0);
  CHECK(reward(make_transition(ActionType::kExpand, {}), q, queue.view(), c, sel,
               cfg) == doctest::Approx(-0.1));
  CHECK(reward(make_transition(ActionType::kSearch, {1, 4}), q, queue.view(), c,
               sel, cfg) == doctest::Approx(1.4));
  queue.push(1, 1);
  CHECK(reward(make_transition(ActionType::kSearch, {1, 2}), q, queue.view(), c,
               sel, cfg) == doctest::Approx(1.4));
}

TEST_CASE("session_returns hand examples") {
  Session s;
  s.transitions.push_back(make_transition(ActionType::kSearch, {1, 2}));
  s.transitions.push_back(make_transition(ActionType::kStop, {}));
  s.transitions[0].reward = 2.9;
  const BootstrapValue half = [](const Transition&, std::size_t) { return 0.5; };
  PPOConfig cfg;
  cfg.beta = 0.0;
  auto r = session_returns(s, half, cfg);
  CHECK(r[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r[1] == 0.0);

  // KL term at its own position only.
  cfg.beta = 0.1;
  s.transitions[0].logprob_old = -1.0;
  s.transitions[0].logprob_sft = -1.5;
  s.transitions[1].logprob_old = -0.2;
  s.transitions[1].logprob_sft = -0.2;
  r = session_returns(s, half, cfg);
  CHECK(r[0] == doctest::Approx(3.0 - 0.05).epsilon(1e-14));
  CHECK(r[1] == 0.0);

  // No in-session discount: each position keeps its own bracket term.
  s.transitions[1].reward = 1.0;
  cfg.gamma0 = 0.0;
  r = session_returns(s, half, cfg);
  CHECK(r[0] == doctest::Approx(3.0 - 0.05).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(1.0));

  s.transitions[0].logprob_old = NAN;
  CHECK_THROWS_AS(session_returns(s, half, cfg), NumericError);
}

TEST_CASE("advantages subtract the sampling-time value") {
  CHECK(advantages(std::vector<double>{3.0}, std::vector<double>{1.0}) ==
        std::vector<double>{2.0});
  const std::vector<double> r{1.5, -2.0, 0.25};
  CHECK(advantages(r, r) == std::vector<double>{0.0, 0.0, 0.0});
  const std::vector<double> v{0.5, 1.0, -0.75};
  const auto a = advantages(r, v);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(a[i] == r[i] - v[i]);
  CHECK_THROWS(advantages(r, std::vector<double>{1.0}));
}

TEST_CASE("clipped surrogate arithmetic and zero gradient on the clipped side") {
  Rng rng(7);
  PolicyParams policy = PolicyParams::zeros(kSmall, ModelKind::kLinear);
  policy.head.randomize(rng, 0.5);
  const ValueParams value = ValueParams::zeros(kSmall, ModelKind::kLinear);
  PPOConfig cfg;

  const TrainBatch clipped = one_sample_batch(policy, 1.5, 2.0, rng);
  const PPOLosses l = ppo_losses(clipped, policy, value, cfg);
  CHECK(l.surrogate[0] == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(l.policy_loss == doctest::Approx(-2.4).epsilon(1e-12));
  CHECK(l.clip_fraction == 1.0);
  for (double g : l.grad_policy) CHECK(g == 0.0);

  const TrainBatch unit = one_sample_batch(policy, 1.0, -0.7, rng);
  const PPOLosses u = ppo_losses(unit, policy, value, cfg);
  CHECK(u.surrogate[0] == doctest::Approx(-0.7).epsilon(1e-12));
  double gnorm = 0.0;
  for (double g : u.grad_policy) gnorm += g * g;
  CHECK(gnorm > 0.0);
}

TEST_CASE("value loss is the max of raw and clipped squared errors") {
  Rng rng(8);
  const PolicyParams policy = PolicyParams::zeros(kSmall, ModelKind::kLinear);
  ValueParams value = ValueParams::zeros(kSmall, ModelKind::kLinear);
  value.head.randomize(rng, 0.5);
  PPOConfig cfg;
  TrainBatch b = one_sample_batch(policy, 1.0, 0.0, rng);
  for (double v_old : {-1.0, -0.1, 0.0, 0.3, 2.0})
    for (double ret : {-2.0, 0.0, 0.4, 3.0}) {
      Transition& t = b.sessions[0].transitions[0];
      t.value_old = v_old;
      t.ret = ret;
      t.advantage = ret - v_old;
      const double v = pasa::value(value, t.state_features);
      const double vc = std::clamp(v, v_old - cfg.epsilon, v_old + cfg.epsilon);
      const double expect = std::max((ret - v) * (ret - v), (ret - vc) * (ret - vc));
      const PPOLosses l = ppo_losses(b, policy, value, cfg);
      CHECK(l.value_loss_terms[0] == expect);
      CHECK(l.rl_loss == doctest::Approx(l.policy_loss + cfg.eta * l.value_loss));
    }
}

TEST_CASE("non-finite ratio names the sample") {
  Rng rng(9);
  const PolicyParams policy = PolicyParams::zeros(kSmall, ModelKind::kLinear);
  const ValueParams value = ValueParams::zeros(kSmall, ModelKind::kLinear);
  TrainBatch b = one_sample_batch(policy, 1.0, 1.0, rng);
  b.sessions[0].transitions[0].logprob_old = -1e6;
  try {
    ppo_losses_serial(b, policy, value, {});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("sample 0") != std::string::npos);
  }
}

TEST_CASE("parallel kernels match their serial references bit for bit") {
  const Fixture fx;
  const TrainSetup setup = fx.setup();
  const PolicyParams policy = random_policy(1);
  const PolicyParams sft = random_policy(2);
  ValueParams value = ValueParams::zeros({}, ModelKind::kLinear);
  Rng vr(3);
  value.head.randomize(vr, 0.1);

  const TrainBatch a = sample_step(setup, policy, sft, value, 77, 4);
  const TrainBatch b = sample_step_serial(setup, policy, sft, value, 77, 4);
  REQUIRE(a.sessions.size() == b.sessions.size());
  CHECK(a.query_ids == b.query_ids);
  CHECK(a.mean_kl == b.mean_kl);
  for (std::size_t s = 0; s < a.sessions.size(); ++s) {
    const auto& x = a.sessions[s].transitions;
    const auto& y = b.sessions[s].transitions;
    REQUIRE(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(x[i].action == y[i].action);
      CHECK(x[i].ret == y[i].ret);
      CHECK(x[i].logprob_old == y[i].logprob_old);
    }
  }

  const PPOLosses lp = ppo_losses(a, policy, value, setup.ppo);
  const PPOLosses ls = ppo_losses_serial(a, policy, value, setup.ppo);
  CHECK(lp.rl_loss == ls.rl_loss);
  CHECK(lp.grad_policy == ls.grad_policy);
  CHECK(lp.grad_value == ls.grad_value);

  const DemoSet demos = make_demos(fx.corpus, fx.queries, 5);
  const NllGrad np = nll_and_grad(policy, demos);
  const NllGrad ns = nll_and_grad_serial(policy, demos);
  CHECK(np.nll == ns.nll);
  CHECK(np.grad == ns.grad);
}

TEST_CASE("sample_step is deterministic and records sampling-time values") {
  const Fixture fx;
  const TrainSetup setup = fx.setup();
  const PolicyParams policy = random_policy(4);
  const ValueParams value = ValueParams::zeros({}, ModelKind::kLinear);
  const TrainBatch a = sample_step(setup, policy, policy, value, 5, 0);
  const TrainBatch b = sample_step(setup, policy, policy, value, 5, 0);
  CHECK(a.query_ids == b.query_ids);
  CHECK(a.query_ids.size() == 4);
  REQUIRE(a.sessions.size() == b.sessions.size());
  for (const Session& s : a.sessions) {
    CHECK(well_formed(s));
    for (const Transition& t : s.transitions) {
      CHECK(t.logprob_old == t.logprob_sft);  // π_old == π_sft here
      CHECK(t.value_old == 0.0);
      CHECK(t.advantage == t.ret);
    }
  }
  CHECK(a.mean_kl == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(sample_step(setup, policy, policy, value, 6, 0).query_ids != a.query_ids);
}

TEST_CASE("sample_step wave sizes") {
  const Corpus c = tiny_corpus();
  Query dead = tiny_query(c);
  dead.candidate_searches = {{{77}, "none"}};
  // Search-loving policy: large bias on the Search one-hot block.
  PolicyParams eager = PolicyParams::zeros({}, ModelKind::kLinear);
  eager.head.params()[0] = 8.0;
  const ValueParams value = ValueParams::zeros({}, ModelKind::kLinear);

  std::vector<Query> qs{dead};
  TrainSetup setup{&c, qs, SelectorModel::exact(), {}, {}, {}};
  setup.ppo.queries_per_step = 1;
  TrainBatch b = sample_step(setup, eager, eager, value, 1, 0);
  CHECK(b.sessions.size() == 1);
  CHECK(b.short_batch);

  // Four papers found: a short first wave of four sessions.
  qs = {tiny_query(c)};
  setup.queries = qs;
  b = sample_step(setup, eager, eager, value, 1, 0);
  REQUIRE(b.sessions.size() >= 5);
  CHECK(b.sessions[0].kind == SessionKind::kQuery);
  int first_wave = 0;
  for (const Session& s : b.sessions) first_wave += s.kind == SessionKind::kQueryPaper && s.depth == 1;
  CHECK(first_wave == 4);
  CHECK(b.short_batch);

  // Plenty of results: exactly six first-wave sessions.
  const Fixture fx;
  TrainSetup big = fx.setup();
  big.ppo.queries_per_step = 1;
  int checked = 0;
  for (int step = 0; step < 5; ++step) {
    const TrainBatch g = sample_step(big, eager, eager, value, 2, step);
    std::size_t found = 0;
    for (const Transition& t : g.sessions[0].transitions) found += t.new_papers.size();
    if (found < 6) continue;
    ++checked;
    std::set<PaperId> papers;
    for (std::size_t s = 1; s <= 6; ++s) {
      CHECK(g.sessions[s].kind == SessionKind::kQueryPaper);
      papers.insert(*g.sessions[s].paper);
    }
    CHECK(papers.size() == 6);
    CHECK(g.sessions.size() <= 13);
  }
  CHECK(checked > 0);
}

TEST_CASE("demo section selection") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  const Paper& p3 = c.paper(3);  // sections: {1,2}, {}, {2}
  Rng rng(10);
  int other = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto picks = select_demo_sections(p3, q, 0.10, rng);
    CHECK(std::find(picks.begin(), picks.end(), 0) != picks.end());
    CHECK(std::find(picks.begin(), picks.end(), 2) != picks.end());
    other += std::find(picks.begin(), picks.end(), 1) != picks.end();
  }
  CHECK(std::abs(other / 10000.0 - 0.10) <= 0.02);
}

TEST_CASE("queries whose searches miss every answer give a Stop-only demo") {
  const Corpus c = tiny_corpus();
  Query q = tiny_query(c);
  q.candidate_searches = {{{9}, "side"}, {{77}, "none"}};
  const std::vector<Query> qs{q};
  const DemoSet demos = make_demos(c, qs, 1);
  REQUIRE(demos.size() == 1);
  CHECK(demos[0].features.n_legal == 3);
  CHECK(demos[0].action_index == 2);

  const std::vector<Query> good{tiny_query(c)};
  const DemoSet d2 = make_demos(c, good, 1);
  REQUIRE(d2.size() >= 2);
  CHECK(d2[0].action_index == 0);  // the full-keyword spec hits answers
  for (const Demo& d : d2) CHECK(d.action_index < d.features.n_legal);
}

TEST_CASE("bc_train lowers NLL and beats the uniform policy") {
  const Fixture fx;
  const DemoSet demos = make_demos(fx.corpus, fx.queries, 3);
  const BCResult r = bc_train(demos, PolicyParams::zeros({}, ModelKind::kLinear), 15, 0.5);
  REQUIRE(r.nll_per_epoch.size() == 16);
  for (std::size_t e = 1; e < r.nll_per_epoch.size(); ++e)
    CHECK(r.nll_per_epoch[e] <= r.nll_per_epoch[e - 1] + 1e-12);
  double p_demo = 0.0, p_uniform = 0.0;
  for (const Demo& d : demos) {
    p_demo += std::exp(logprob(r.policy.params(), d.features.rows(), d.action_index));
    p_uniform += 1.0 / static_cast<double>(d.features.n_legal);
  }
  CHECK(p_demo > p_uniform);
  CHECK(mean_nll(r.policy.params(), demos) == doctest::Approx(r.nll_per_epoch.back()));
  CHECK(bc_train(demos, r.policy.params(), 0, 0.5).policy.params() == r.policy.params());
}

TEST_CASE("ppo_train freezes the policy during value warm-up") {
  const Fixture fx;
  TrainSetup setup = fx.setup();
  setup.ppo.total_steps = 4;
  setup.ppo.policy_freeze_steps = 2;
  setup.ppo.learning_rate = 0.01;
  const PolicySnapshot sft(random_policy(11));
  std::vector<PolicyParams> thetas;
  std::vector<ValueParams> phis;
  TrainHooks hooks;
  hooks.on_step = [&](const StepMetrics&, const PolicyParams& p, const ValueParams& v) {
    thetas.push_back(p);
    phis.push_back(v);
  };
  const TrainResult r = ppo_train(setup, sft, ValueParams::zeros({}, ModelKind::kLinear), 12, hooks);
  REQUIRE(r.metrics.size() == 4);
  CHECK(thetas[0] == sft.params());
  CHECK(thetas[1] == sft.params());
  CHECK_FALSE(thetas[3] == sft.params());
  CHECK_FALSE(phis[0] == ValueParams::zeros({}, ModelKind::kLinear));
  CHECK(r.metrics[0].phase == "value-warmup");
  CHECK(r.metrics[2].phase == "joint");
  for (const StepMetrics& m : r.metrics) CHECK(std::isfinite(m.mean_return));

  // Same seed, same result.
  const TrainResult again = ppo_train(setup, sft, ValueParams::zeros({}, ModelKind::kLinear), 12);
  CHECK(again.policy == r.policy);
  CHECK(again.value == r.value);
}

TEST_CASE("config validation") {
  RewardConfig rc;
  rc.alpha = 0.0;
  CHECK_THROWS_AS(rc.validate(), ConfigError);
  rc = {};
  rc.cost_expand = -0.1;
  CHECK_THROWS_AS(rc.validate(), ConfigError);
  PPOConfig pc;
  pc.epsilon = 1.0;
  CHECK_THROWS_AS(pc.validate(), ConfigError);
  pc = {};
  pc.gamma1 = 1.5;
  CHECK_THROWS_AS(pc.validate(), ConfigError);
  pc = {};
  pc.queries_per_step = 0;
  CHECK_THROWS_AS(pc.validate(), ConfigError);
}
