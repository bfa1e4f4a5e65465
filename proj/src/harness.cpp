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

#include "pasa/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "pasa/parallel.hpp"

namespace pasa {

// ---------------------------------------------------------------- metrics --

double recall_at_k(std::span<const PaperId> ranked,
                   std::span<const PaperId> answers, int k) {
  if (answers.empty()) throw ContractViolation("recall_at_k: empty answers");
  if (k < 0) throw ContractViolation("recall_at_k: k must be >= 0");
  const std::unordered_set<PaperId> truth(answers.begin(), answers.end());
  const std::size_t top = std::min(ranked.size(), static_cast<std::size_t>(k));
  std::unordered_set<PaperId> hit;
  for (std::size_t i = 0; i < top; ++i)
    if (truth.count(ranked[i])) hit.insert(ranked[i]);
  return static_cast<double>(hit.size()) / static_cast<double>(truth.size());
}

std::vector<PaperId> rank_by_score(std::span<const PaperId> queue,
                                   std::span<const double> scores) {
  if (queue.size() != scores.size())
    throw ContractViolation("rank_by_score: length mismatch");
  std::vector<std::size_t> order(queue.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<PaperId> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(queue[i]);
  return out;
}

QueryEval score_queue(std::span<const PaperId> queue, const Query& query,
                      const SelectFn& decide, std::span<const int> ks) {
  if (query.answers.empty())
    throw ContractViolation("query " + std::to_string(query.id) +
                            " has no answers");
  QueryEval out;
  out.query_id = query.id;
  out.queue_size = queue.size();
  std::size_t found = 0, selected_hits = 0;
  std::vector<double> scores;
  scores.reserve(queue.size());
  for (PaperId p : queue) {
    const bool answer = query.is_answer(p);
    found += answer ? 1 : 0;
    const Decision d = decide(p);
    scores.push_back(d.score);
    if (d.accept) {
      ++out.selected;
      selected_hits += answer ? 1 : 0;
    }
  }
  const double n_answers = static_cast<double>(query.answers.size());
  out.crawler_recall = static_cast<double>(found) / n_answers;
  out.recall = static_cast<double>(selected_hits) / n_answers;
  out.precision = out.selected ? static_cast<double>(selected_hits) /
                                     static_cast<double>(out.selected)
                               : 0.0;
  const auto ranked = rank_by_score(queue, scores);
  for (int k : ks) out.recall_at_k[k] = recall_at_k(ranked, query.answers, k);
  return out;
}

EvalResult aggregate(std::vector<QueryEval> per_query) {
  if (per_query.empty()) throw UsageError("evaluation needs at least one query");
  EvalResult r;
  const double n = static_cast<double>(per_query.size());
  for (const QueryEval& q : per_query) {
    r.crawler_recall += q.crawler_recall;
    r.precision += q.precision;
    r.recall += q.recall;
    for (const auto& [k, v] : q.recall_at_k) r.recall_at_k[k] += v;
    r.actions.search += q.actions.search;
    r.actions.expand += q.actions.expand;
    r.actions.stop += q.actions.stop;
    r.actions.sessions += q.actions.sessions;
  }
  r.crawler_recall /= n;
  r.precision /= n;
  r.recall /= n;
  for (auto& [k, v] : r.recall_at_k) v /= n;
  r.mean_actions = static_cast<double>(r.actions.non_stop()) / n;
  r.per_query = std::move(per_query);
  return r;
}

namespace {

ActionCounts count_actions(const std::vector<Session>& sessions) {
  ActionCounts c;
  for (const Session& s : sessions) {
    ++c.sessions;
    for (const Transition& t : s.transitions) {
      switch (t.action.type) {
        case ActionType::kSearch:
          ++c.search;
          break;
        case ActionType::kExpand:
          ++c.expand;
          break;
        case ActionType::kStop:
          ++c.stop;
          break;
      }
    }
  }
  return c;
}

void add_counts(ActionCounts& into, const ActionCounts& c) {
  into.search += c.search;
  into.expand += c.expand;
  into.stop += c.stop;
  into.sessions += c.sessions;
}

SelectFn selector_fn(const SelectorModel& selector, const Corpus& corpus,
                     const Query& query) {
  return [&selector, &corpus, &query](PaperId p) {
    return select(selector, corpus, query, p);
  };
}

struct QueryRun {
  CrawlResult crawl;
  std::vector<PaperId> queue;
};

QueryRun crawl_query(const PolicySnapshot& policy, const Corpus& corpus,
                     const Query& query, const EnvLimits& limits,
                     std::uint64_t seed, int run, bool greedy) {
  const PolicyChooser chooser(policy, greedy);
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(query.id),
                      static_cast<std::uint64_t>(run)));
  QueryRun out{run_crawler(chooser, query, corpus, limits, rng), {}};
  out.queue = out.crawl.queue.ids();
  return out;
}

void check_eval_inputs(std::span<const Query> queries,
                       const SelectorModel& selector,
                       const EnvLimits& limits) {
  if (queries.empty()) throw UsageError("evaluation needs at least one query");
  selector.validate();
  limits.validate();
}

QueryEval eval_one(const PolicySnapshot& policy, const SelectorModel& selector,
                   const Corpus& corpus, const Query& q,
                   const EnvLimits& limits, std::uint64_t seed,
                   const EvalOptions& opts, Rollout* keep) {
  QueryRun run = crawl_query(policy, corpus, q, limits, seed, 0, opts.greedy);
  QueryEval e = score_queue(run.queue, q, selector_fn(selector, corpus, q),
                            opts.ks);
  e.actions = count_actions(run.crawl.sessions);
  e.truncated = run.crawl.truncated;
  if (keep != nullptr) {
    if (opts.reward != nullptr)
      fill_rewards(run.crawl.sessions, run.crawl.queue, q, corpus, selector,
                   *opts.reward);
    for (Session& s : run.crawl.sessions) {
      for (Transition& t : s.transitions) {
        t.action_features.clear();
        t.action_features.shrink_to_fit();
        t.state_features.clear();
        t.state_features.shrink_to_fit();
      }
    }
    *keep = {q.id, std::move(run.queue), std::move(run.crawl.sessions)};
  }
  return e;
}

}  // namespace

EvalResult evaluate(const PolicySnapshot& policy, const SelectorModel& selector,
                    const Corpus& corpus, std::span<const Query> queries,
                    const EnvLimits& limits, std::uint64_t seed,
                    const EvalOptions& opts, std::vector<Rollout>* rollouts) {
  check_eval_inputs(queries, selector, limits);
  std::vector<QueryEval> per(queries.size());
  const bool keep = rollouts != nullptr || opts.keep_rollouts;
  std::vector<Rollout> kept(keep ? queries.size() : 0);
  parallel_for(queries.size(), [&](std::size_t i) {
    per[i] = eval_one(policy, selector, corpus, queries[i], limits, seed, opts,
                      keep ? &kept[i] : nullptr);
  });
  if (rollouts != nullptr) *rollouts = std::move(kept);
  return aggregate(std::move(per));
}

EvalResult evaluate_serial(const PolicySnapshot& policy,
                           const SelectorModel& selector, const Corpus& corpus,
                           std::span<const Query> queries,
                           const EnvLimits& limits, std::uint64_t seed,
                           const EvalOptions& opts) {
  check_eval_inputs(queries, selector, limits);
  std::vector<QueryEval> per;
  for (const Query& q : queries)
    per.push_back(
        eval_one(policy, selector, corpus, q, limits, seed, opts, nullptr));
  return aggregate(std::move(per));
}

EvalResult ensemble_eval(const PolicySnapshot& policy,
                         const SelectorModel& selector, const Corpus& corpus,
                         std::span<const Query> queries,
                         const EnvLimits& limits, int n_runs,
                         std::uint64_t seed, const EvalOptions& opts) {
  if (n_runs < 1) throw UsageError("ensemble needs n_runs >= 1");
  check_eval_inputs(queries, selector, limits);
  std::vector<QueryEval> per(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) {
    const Query& q = queries[i];
    std::vector<PaperId> merged;
    std::unordered_set<PaperId> seen;
    ActionCounts counts;
    bool truncated = false;
    for (int r = 0; r < n_runs; ++r) {
      const QueryRun run =
          crawl_query(policy, corpus, q, limits, seed, r, opts.greedy);
      for (PaperId p : run.queue)
        if (seen.insert(p).second) merged.push_back(p);
      add_counts(counts, count_actions(run.crawl.sessions));
      truncated |= run.crawl.truncated;
    }
    per[i] = score_queue(merged, q, selector_fn(selector, corpus, q), opts.ks);
    per[i].actions = counts;
    per[i].truncated = truncated;
  });
  return aggregate(std::move(per));
}

void write_eval_csv(std::ostream& out, const EvalResult& result) {
  out << "query_id,crawler_recall,precision,recall";
  for (const auto& [k, v] : result.recall_at_k) out << ",recall_at_" << k;
  out << ",queue_size,selected,search,expand,stop,sessions,truncated\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return std::string(buf);
  };
  for (const QueryEval& q : result.per_query) {
    out << q.query_id << ',' << num(q.crawler_recall) << ','
        << num(q.precision) << ',' << num(q.recall);
    for (const auto& [k, v] : q.recall_at_k) out << ',' << num(v);
    out << ',' << q.queue_size << ',' << q.selected << ',' << q.actions.search
        << ',' << q.actions.expand << ',' << q.actions.stop << ','
        << q.actions.sessions << ',' << (q.truncated ? 1 : 0) << '\n';
  }
  out << "mean," << num(result.crawler_recall) << ','
      << num(result.precision) << ',' << num(result.recall);
  for (const auto& [k, v] : result.recall_at_k) out << ',' << num(v);
  out << ",,," << result.actions.search << ',' << result.actions.expand << ','
      << result.actions.stop << ',' << result.actions.sessions << ",\n";
}

// ------------------------------------------------------------- pipelines --

BCResult train_sft(const Experiment& ex) {
  if (ex.corpus == nullptr) throw ContractViolation("experiment has no corpus");
  const std::size_t n = std::min<std::size_t>(
      ex.train_queries.size(), static_cast<std::size_t>(ex.bc.queries));
  if (n == 0) throw UsageError("bc-train needs at least one training query");
  DemoConfig dc = ex.bc.demo;
  dc.limits = ex.limits;
  dc.features = ex.model.features;
  const DemoSet demos =
      make_demos(*ex.corpus, ex.train_queries.first(n),
                 derive_seed(ex.train_seed, 0xBC), dc);
  PolicyParams init =
      PolicyParams::zeros(ex.model.features, ex.model.kind, ex.model.hidden);
  if (ex.model.kind == ModelKind::kMlp) {
    Rng rng(derive_seed(ex.train_seed, 0x1A));
    init.head.randomize(rng, 0.1);
  }
  return bc_train(demos, std::move(init), ex.bc.epochs, ex.bc.learning_rate);
}

VariantOverrides base_overrides(const Experiment& ex) {
  return {ex.reward, ex.ppo, ex.limits};
}

TrainResult train_ppo(const Experiment& ex, const PolicySnapshot& sft,
                      const VariantOverrides& v, const TrainHooks& hooks) {
  TrainSetup setup{ex.corpus, ex.train_queries, ex.selector, v.reward, v.ppo,
                   v.limits};
  ValueParams value =
      ValueParams::zeros(ex.model.features, ex.model.kind, ex.model.hidden);
  if (ex.model.kind == ModelKind::kMlp) {
    Rng rng(derive_seed(ex.train_seed, 0x1B));
    value.head.randomize(rng, 0.1);
  }
  return ppo_train(setup, sft, std::move(value), ex.train_seed, hooks);
}

namespace {

std::string setting(const char* name, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s=%g", name, x);
  return buf;
}

}  // namespace

std::vector<AblationRow> ablate(const Experiment& ex,
                                const std::vector<std::string>& variants) {
  for (const std::string& v : variants)
    if (std::find(ablation_variants().begin(), ablation_variants().end(), v) ==
        ablation_variants().end())
      throw UsageError("unknown ablation variant '" + v + "'");
  return ablate(ex, variants, train_sft(ex).policy);
}

std::vector<AblationRow> ablate(const Experiment& ex,
                                const std::vector<std::string>& variants,
                                const PolicySnapshot& sft) {
  const auto& known = ablation_variants();
  for (const std::string& v : variants)
    if (std::find(known.begin(), known.end(), v) == known.end())
      throw UsageError("unknown ablation variant '" + v + "'");

  TrainSetup kl_setup{ex.corpus, ex.eval_queries, ex.selector, ex.reward,
                      ex.ppo, ex.limits};
  auto run = [&](const std::string& name, const std::string& label,
                 const VariantOverrides& v) {
    const TrainResult tr = train_ppo(ex, sft, v);
    AblationRow row{name, label,
                    evaluate(PolicySnapshot(tr.policy), ex.selector,
                             *ex.corpus, ex.eval_queries, v.limits,
                             ex.eval_seed, ex.eval),
                    0.0};
    kl_setup.limits = v.limits;
    row.final_kl = mean_policy_kl(kl_setup, tr.policy, sft.params(),
                                  derive_seed(ex.eval_seed, 0x4B));
    return row;
  };

  std::vector<AblationRow> rows;
  for (const std::string& name : variants) {
    VariantOverrides v = base_overrides(ex);
    if (name == "full") {
      rows.push_back(run(name, "", v));
    } else if (name == "no-expand") {
      v.limits.allow_expand = false;
      rows.push_back(run(name, "", v));
    } else if (name == "no-rl") {
      rows.push_back({name, "",
                      evaluate(sft, ex.selector, *ex.corpus, ex.eval_queries,
                               ex.limits, ex.eval_seed, ex.eval),
                      0.0});
    } else if (name == "exact-set-reward") {
      v.reward.indicator = IndicatorMode::kAnswerOnly;
      rows.push_back(run(name, "", v));
    } else if (name == "alpha-sweep") {
      for (double a : ex.alphas) {
        VariantOverrides va = v;
        va.reward.alpha = a;
        rows.push_back(run(name, setting("alpha", a), va));
      }
    } else if (name == "cost-sweep") {
      for (double c : ex.costs) {
        VariantOverrides vc = v;
        vc.reward.cost_search = c;
        vc.reward.cost_expand = c;
        rows.push_back(run(name, setting("cost", c), vc));
      }
    }
  }
  return rows;
}

void write_ablation_csv(std::ostream& out,
                        const std::vector<AblationRow>& rows,
                        std::span<const int> ks) {
  out << "variant,setting,crawler_recall,precision,recall";
  for (int k : ks) out << ",recall_at_" << k;
  out << ",mean_actions,final_kl\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return std::string(buf);
  };
  for (const AblationRow& r : rows) {
    out << r.variant << ',' << r.setting << ',' << num(r.eval.crawler_recall)
        << ',' << num(r.eval.precision) << ',' << num(r.eval.recall);
    for (int k : ks) {
      const auto it = r.eval.recall_at_k.find(k);
      out << ',' << num(it == r.eval.recall_at_k.end() ? 0.0 : it->second);
    }
    out << ',' << num(r.eval.mean_actions) << ',' << num(r.final_kl) << '\n';
  }
}

}  // namespace pasa
