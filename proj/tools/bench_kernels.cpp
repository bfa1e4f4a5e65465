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

// Times the OpenMP kernels against their serial references and checks that
// both produce identical results.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "pasa/harness.hpp"
#include "pasa/parallel.hpp"

namespace {

double seconds(const std::function<void()>& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-14s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  %s\n",
              name, serial, parallel, serial / parallel,
              same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::stoi(argv[1]) : 3;
  const int threads = pasa::configure_threads_from_env();
  std::printf("threads: %d\n", threads);

  using namespace pasa;
  CorpusConfig cc;
  cc.n_papers = 1000;
  const Corpus corpus = gen_corpus(cc, 7);
  const auto queries = gen_queries(corpus, 24, 8);

  DemoConfig dc;
  const DemoSet demos = make_demos(corpus, queries, 9, dc);
  const PolicyParams sft = bc_train(demos, PolicyParams::zeros({}, ModelKind::kLinear), 10, 1.0)
                               .policy.params();
  const ValueParams value = ValueParams::zeros({}, ModelKind::kLinear);

  {
    NllGrad a, b;
    const double ts = seconds([&] { a = nll_and_grad_serial(sft, demos); }, reps);
    const double tp = seconds([&] { b = nll_and_grad(sft, demos); }, reps);
    report("nll_and_grad", ts, tp, a.nll == b.nll && a.grad == b.grad);
  }

  TrainSetup setup{&corpus, queries, SelectorModel::exact(), {}, {}, {}};
  setup.ppo.queries_per_step = 8;
  {
    TrainBatch a, b;
    const double ts = seconds(
        [&] { a = sample_step_serial(setup, sft, sft, value, 11, 1); }, reps);
    const double tp =
        seconds([&] { b = sample_step(setup, sft, sft, value, 11, 1); }, reps);
    bool same = a.sessions.size() == b.sessions.size();
    for (std::size_t s = 0; same && s < a.sessions.size(); ++s) {
      const auto& x = a.sessions[s].transitions;
      const auto& y = b.sessions[s].transitions;
      same = x.size() == y.size();
      for (std::size_t i = 0; same && i < x.size(); ++i)
        same = x[i].ret == y[i].ret && x[i].action == y[i].action;
    }
    report("sample_step", ts, tp, same);

    PPOLosses la, lb;
    const double ls = seconds(
        [&] { la = ppo_losses_serial(a, sft, value, setup.ppo); }, reps);
    const double lp =
        seconds([&] { lb = ppo_losses(a, sft, value, setup.ppo); }, reps);
    report("ppo_losses", ls, lp,
           la.rl_loss == lb.rl_loss && la.grad_policy == lb.grad_policy &&
               la.grad_value == lb.grad_value);
  }

  {
    const PolicySnapshot snap(sft);
    EvalResult a, b;
    const double ts = seconds(
        [&] {
          a = evaluate_serial(snap, SelectorModel::exact(), corpus, queries,
                              {}, 13);
        },
        reps);
    const double tp = seconds(
        [&] {
          b = evaluate(snap, SelectorModel::exact(), corpus, queries, {}, 13);
        },
        reps);
    report("evaluate", ts, tp,
           a.crawler_recall == b.crawler_recall &&
               a.mean_actions == b.mean_actions);
  }
  return 0;
}
