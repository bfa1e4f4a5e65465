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

#include "pasa/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "pasa/harness.hpp"
#include "pasa/parallel.hpp"
#include "pasa/run_config.hpp"

namespace pasa {

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config;
  std::vector<std::string> sets;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config, "RunConfig file")->required();
  cmd->add_option("--set", o.sets, "Override, as section.key=value");
  cmd->add_option("--out-dir", o.out_dir, "Override paths.output_dir");
}

RunConfig load(const CommonOpts& o) {
  ConfigOverrides ov;
  for (const std::string& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw UsageError("--set expects section.key=value, got '" + s + "'");
    ov[s.substr(0, eq)] = s.substr(eq + 1);
  }
  RunConfig c = load_run_config(o.config, ov);
  if (!o.out_dir.empty()) c.output_dir = o.out_dir;
  return c;
}

// Flag value if given, else the config path resolved against its directory.
std::string pick_path(const std::string& flag_value, const RunConfig& c,
                      const std::string& config_value) {
  return flag_value.empty() ? c.resolve(config_value) : flag_value;
}

std::string output_dir(const RunConfig& c) {
  const std::string dir = c.resolve(c.output_dir.empty() ? "." : c.output_dir);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const std::string& path) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  return f;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  save_checkpoint(path, ckpt);
}

struct Data {
  Corpus corpus;
  std::vector<Query> train;
  std::vector<Query> eval;
};

Experiment experiment(const RunConfig& c, const Data& d) {
  Experiment ex;
  ex.corpus = &d.corpus;
  ex.train_queries = d.train;
  ex.eval_queries = d.eval;
  ex.selector = c.selector;
  ex.reward = c.reward;
  ex.ppo = c.ppo;
  ex.limits = c.limits;
  ex.model = c.model;
  ex.bc = c.bc;
  ex.eval = c.eval;
  ex.train_seed = c.train_seed;
  ex.eval_seed = c.eval_seed;
  ex.alphas = c.alphas;
  ex.costs = c.costs;
  return ex;
}

Corpus load_corpus_from(const std::string& path) {
  require_file(path, "corpus");
  return load_corpus(path);
}

std::vector<Query> load_queries_from(const std::string& path,
                                     const std::string& field) {
  require_file(path, field);
  return load_queries(path);
}

Checkpoint load_checkpoint_from(const std::string& path,
                                const std::string& flag) {
  if (path.empty()) throw UsageError("missing " + flag);
  require_file(path, flag);
  return load_checkpoint(path);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

void print_summary(std::ostream& out, const std::string& label,
                   const EvalResult& r) {
  out << label << ": crawler_recall=" << fmt(r.crawler_recall)
      << " precision=" << fmt(r.precision) << " recall=" << fmt(r.recall);
  for (const auto& [k, v] : r.recall_at_k)
    out << " recall@" << k << '=' << fmt(v);
  out << " mean_actions=" << fmt(r.mean_actions) << '\n';
}

// ------------------------------------------------------------ subcommands --

void cmd_gen_corpus(const CommonOpts& o, std::optional<std::uint64_t> seed,
                    const std::string& out_path, std::ostream& out) {
  const RunConfig c = load(o);
  const std::string path = pick_path(out_path, c, c.corpus_path);
  if (path.empty()) throw UsageError("missing --out (or paths.corpus)");
  const Corpus corpus = gen_corpus(c.corpus, seed.value_or(c.corpus_seed));
  auto f = open_out(path);
  write_corpus(f, corpus);
  out << "wrote " << corpus.size() << " papers to " << path << '\n';
}

void cmd_gen_queries(const CommonOpts& o, std::optional<std::uint64_t> seed,
                     const std::string& corpus_flag,
                     const std::string& train_flag,
                     const std::string& eval_flag, std::ostream& out) {
  const RunConfig c = load(o);
  const Corpus corpus =
      load_corpus_from(pick_path(corpus_flag, c, c.corpus_path));
  const std::string train_path =
      pick_path(train_flag, c, c.train_queries_path);
  const std::string eval_path = pick_path(eval_flag, c, c.eval_queries_path);
  if (train_path.empty())
    throw UsageError("missing --out-train (or paths.train_queries)");
  if (eval_path.empty())
    throw UsageError("missing --out-eval (or paths.eval_queries)");
  auto all = gen_queries(corpus, c.n_train_queries + c.n_eval_queries,
                         seed.value_or(c.query_seed), c.queries);
  std::vector<Query> train(all.begin(), all.begin() + c.n_train_queries);
  std::vector<Query> eval(all.begin() + c.n_train_queries, all.end());
  auto ft = open_out(train_path);
  write_queries(ft, train);
  auto fe = open_out(eval_path);
  write_queries(fe, eval);
  out << "wrote " << train.size() << " train queries to " << train_path
      << " and " << eval.size() << " eval queries to " << eval_path << '\n';
}

Data load_data(const RunConfig& c, bool need_train, bool need_eval) {
  Data d;
  d.corpus = load_corpus_from(c.resolve(c.corpus_path));
  if (need_train)
    d.train = load_queries_from(c.resolve(c.train_queries_path),
                                "train queries");
  if (need_eval)
    d.eval =
        load_queries_from(c.resolve(c.eval_queries_path), "eval queries");
  return d;
}

void cmd_bc_train(const CommonOpts& o, const std::string& out_flag,
                  std::ostream& out) {
  const RunConfig c = load(o);
  const std::string path = pick_path(out_flag, c, c.sft_checkpoint_path);
  if (path.empty()) throw UsageError("missing --out (or paths.sft_checkpoint)");
  const Data d = load_data(c, true, false);
  const Experiment ex = experiment(c, d);
  const BCResult bc = train_sft(ex);
  const Checkpoint ckpt{bc.policy.params(),
                        ValueParams::zeros(c.model.features, c.model.kind,
                                           c.model.hidden),
                        0};
  write_checkpoint(path, ckpt);
  auto f = open_out((fs::path(output_dir(c)) / "bc_nll.csv").string());
  f << "epoch,mean_nll\n";
  for (std::size_t e = 0; e < bc.nll_per_epoch.size(); ++e)
    f << e << ',' << bc.nll_per_epoch[e] << '\n';
  out << "bc: nll " << fmt(bc.nll_per_epoch.front()) << " -> "
      << fmt(bc.nll_per_epoch.back()) << ", wrote " << path << '\n';
}

void cmd_ppo_train(const CommonOpts& o, const std::string& sft_flag,
                   const std::string& out_flag, std::ostream& out) {
  const RunConfig c = load(o);
  const std::string out_path = pick_path(out_flag, c, c.checkpoint_path);
  if (out_path.empty()) throw UsageError("missing --out (or paths.checkpoint)");
  const Checkpoint sft = load_checkpoint_from(
      pick_path(sft_flag, c, c.sft_checkpoint_path), "--sft");
  if (!(sft.policy.features == c.model.features) ||
      !(sft.policy.head.shape().kind == c.model.kind))
    throw DataError("sft checkpoint does not match the configured model");
  const Data d = load_data(c, true, false);
  const Experiment ex = experiment(c, d);
  const std::string dir = output_dir(c);

  auto metrics_file = open_out((fs::path(dir) / "metrics.csv").string());
  std::vector<StepMetrics> seen;
  TrainHooks hooks;
  hooks.on_step = [&](const StepMetrics& m, const PolicyParams& p,
                      const ValueParams& v) {
    seen.push_back(m);
    if (c.checkpoint_every > 0 && m.step % c.checkpoint_every == 0)
      write_checkpoint((fs::path(dir) / ("checkpoint.step" +
                                        std::to_string(m.step) + ".json"))
                          .string(),
                      {p, v, m.step});
  };
  try {
    const TrainResult r =
        train_ppo(ex, PolicySnapshot(sft.policy), base_overrides(ex), hooks);
    write_metrics_csv(metrics_file, r.metrics);
    write_checkpoint(out_path, {r.policy, r.value, c.ppo.total_steps});
    out << "ppo: " << r.metrics.size() << " steps, final mean_return "
        << fmt(r.metrics.back().mean_return) << ", wrote " << out_path
        << '\n';
  } catch (const TrainingDiverged& e) {
    write_metrics_csv(metrics_file, seen);
    write_checkpoint(out_path + ".last_good.json", e.last_good());
    throw;
  }
}

void write_rollouts(const std::string& path,
                    const std::vector<Rollout>& rollouts) {
  auto f = open_out(path);
  for (const Rollout& r : rollouts)
    write_rollout_trace(f, r.sessions, r.query_id);
}

void cmd_eval(const CommonOpts& o, const std::string& ckpt_flag,
              std::ostream& out) {
  const RunConfig c = load(o);
  const Checkpoint ckpt = load_checkpoint_from(
      pick_path(ckpt_flag, c, c.checkpoint_path), "--checkpoint");
  const Data d = load_data(c, false, true);
  const std::string dir = output_dir(c);
  EvalOptions opts = c.eval;
  opts.reward = &c.reward;
  std::vector<Rollout> rollouts;
  const EvalResult r =
      evaluate(PolicySnapshot(ckpt.policy), c.selector, d.corpus, d.eval,
               c.limits, c.eval_seed, opts, &rollouts);
  auto f = open_out((fs::path(dir) / "eval.csv").string());
  write_eval_csv(f, r);
  write_rollouts((fs::path(dir) / "rollouts.jsonl").string(), rollouts);
  print_summary(out, "eval", r);
}

void cmd_ensemble(const CommonOpts& o, const std::string& ckpt_flag,
                  std::optional<int> runs, std::ostream& out) {
  const RunConfig c = load(o);
  const Checkpoint ckpt = load_checkpoint_from(
      pick_path(ckpt_flag, c, c.checkpoint_path), "--checkpoint");
  const Data d = load_data(c, false, true);
  const int n = runs.value_or(c.ensemble_runs);
  const EvalResult r =
      ensemble_eval(PolicySnapshot(ckpt.policy), c.selector, d.corpus, d.eval,
                    c.limits, n, c.eval_seed, c.eval);
  auto f = open_out((fs::path(output_dir(c)) / "ensemble.csv").string());
  write_eval_csv(f, r);
  print_summary(out, "ensemble x" + std::to_string(n), r);
}

void cmd_ablate(const CommonOpts& o, const std::string& sft_flag,
                std::vector<std::string> variants, std::ostream& out) {
  const RunConfig c = load(o);
  if (variants.empty()) variants = c.ablate_variants;
  if (variants.empty()) throw UsageError("missing --variants");
  for (const std::string& v : variants)
    if (std::find(ablation_variants().begin(), ablation_variants().end(), v) ==
        ablation_variants().end())
      throw UsageError("unknown ablation variant '" + v + "'");
  const Data d = load_data(c, true, true);
  const Experiment ex = experiment(c, d);
  const std::string sft_path = pick_path(sft_flag, c, c.sft_checkpoint_path);
  std::vector<AblationRow> rows;
  if (!sft_path.empty() && fs::exists(sft_path))
    rows = ablate(ex, variants,
                  PolicySnapshot(load_checkpoint(sft_path).policy));
  else
    rows = ablate(ex, variants);
  auto f = open_out((fs::path(output_dir(c)) / "ablation.csv").string());
  write_ablation_csv(f, rows, c.eval.ks);
  for (const AblationRow& r : rows)
    print_summary(out, r.variant + (r.setting.empty() ? "" : " " + r.setting),
                  r.eval);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  configure_threads_from_env();
  CLI::App app{"pasa-lab: paper-search crawler lab"};
  app.require_subcommand(1);

  CommonOpts o;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::string out_path, corpus_path, train_path, eval_path, ckpt_path,
      sft_path;
  std::vector<std::string> variants;

  auto* gc = app.add_subcommand("gen-corpus", "Generate a synthetic corpus");
  add_common(gc, o);
  gc->add_option("--seed", seed, "Override seeds.corpus");
  gc->add_option("--out", out_path, "Corpus JSONL path");

  auto* gq = app.add_subcommand("gen-queries", "Generate train/eval queries");
  add_common(gq, o);
  gq->add_option("--seed", seed, "Override seeds.queries");
  gq->add_option("--corpus", corpus_path, "Corpus JSONL path");
  gq->add_option("--out-train", train_path, "Train queries path");
  gq->add_option("--out-eval", eval_path, "Eval queries path");

  auto* bc = app.add_subcommand("bc-train", "Imitation pretraining");
  add_common(bc, o);
  bc->add_option("--out", out_path, "SFT checkpoint path");

  auto* pp = app.add_subcommand("ppo-train", "Session-level PPO");
  add_common(pp, o);
  pp->add_option("--sft", sft_path, "SFT checkpoint");
  pp->add_option("--out", out_path, "Final checkpoint path");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(ev, o);
  ev->add_option("--checkpoint", ckpt_path, "Policy checkpoint");

  auto* ab = app.add_subcommand("ablate", "Run ablation variants");
  add_common(ab, o);
  ab->add_option("--sft", sft_path, "SFT checkpoint (trained if absent)");
  ab->add_option("--variants", variants, "Variant names")->delimiter(',');

  auto* en = app.add_subcommand("ensemble", "Union of sampled crawler runs");
  add_common(en, o);
  en->add_option("--checkpoint", ckpt_path, "Policy checkpoint");
  en->add_option("--runs", runs, "Number of runs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (gc->parsed()) cmd_gen_corpus(o, seed, out_path, out);
    else if (gq->parsed())
      cmd_gen_queries(o, seed, corpus_path, train_path, eval_path, out);
    else if (bc->parsed()) cmd_bc_train(o, out_path, out);
    else if (pp->parsed()) cmd_ppo_train(o, sft_path, out_path, out);
    else if (ev->parsed()) cmd_eval(o, ckpt_path, out);
    else if (ab->parsed()) cmd_ablate(o, sft_path, variants, out);
    else if (en->parsed()) cmd_ensemble(o, ckpt_path, runs, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ContractViolation& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace pasa
