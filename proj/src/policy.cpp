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

#include "pasa/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace pasa {

namespace {

const double kLogQueueScale = std::log(1001.0);
const double kLogCountScale = std::log(11.0);

int bucket_of(Token t, int buckets) {
  return static_cast<int>(splitmix64(static_cast<std::uint64_t>(t)) %
                          static_cast<std::uint64_t>(buckets));
}

double relevance(const Paper& p, const Query& q) {
  return static_cast<double>(keyword_overlap(p.keywords, q.keywords)) /
         static_cast<double>(std::max<std::size_t>(1, q.keywords.size()));
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void check_scores(std::span<const double> scores) {
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (!std::isfinite(scores[i]))
      throw NumericError("non-finite action score at index " +
                         std::to_string(i));
}

}  // namespace

// ------------------------------------------------------------- features --

void FeatureConfig::validate() const {
  if (hist_buckets < 1) throw ConfigError("hist_buckets", "must be >= 1");
}

int state_dim(const FeatureConfig& cfg) {
  return kStateScalars + 2 * cfg.hist_buckets;
}

int action_dim(const FeatureConfig& cfg) {
  return kNumActionTypes * state_dim(cfg) + kActionScalars;
}

std::vector<double> state_features(const Episode& episode,
                                   const AgentState& state,
                                   const FeatureConfig& cfg) {
  const Query& q = episode.query();
  const EnvLimits& lim = episode.limits();
  std::vector<double> f(state_dim(cfg), 0.0);
  f[0] = 1.0;
  f[1] = state.kind == SessionKind::kQueryPaper ? 1.0 : 0.0;
  f[2] = static_cast<double>(state.depth) / lim.depth_limit;
  f[3] = static_cast<double>(state.actions_taken.size()) /
         lim.max_actions_per_session;
  f[4] = std::log1p(static_cast<double>(episode.queue().size())) /
         kLogQueueScale;
  f[6] = std::log1p(static_cast<double>(state.last_new_papers)) /
         kLogCountScale;
  f[7] = state.actions_taken.empty()
             ? 0.0
             : static_cast<double>(state.productive_actions) /
                   static_cast<double>(state.actions_taken.size());

  const int b = cfg.hist_buckets;
  for (Token t : q.keywords)
    f[kStateScalars + bucket_of(t, b)] +=
        1.0 / static_cast<double>(q.keywords.size());
  if (state.current_paper) {
    const Paper& p = episode.corpus().paper(*state.current_paper);
    f[5] = relevance(p, q);
    for (Token t : p.keywords)
      f[kStateScalars + b + bucket_of(t, b)] +=
          1.0 / static_cast<double>(p.keywords.size());
  }
  return f;
}

Features featurize(const Episode& episode, const AgentState& state,
                   std::span<const Action> legal, const FeatureConfig& cfg) {
  Features out;
  out.state = state_features(episode, state, cfg);
  out.n_legal = legal.size();
  out.dim = static_cast<std::size_t>(action_dim(cfg));
  out.actions.assign(out.n_legal * out.dim, 0.0);

  const Query& q = episode.query();
  const Corpus& corpus = episode.corpus();
  const std::size_t ds = out.state.size();
  const std::size_t own = kNumActionTypes * ds;

  for (std::size_t i = 0; i < legal.size(); ++i) {
    const Action& a = legal[i];
    double* row = out.actions.data() + i * out.dim;
    std::copy(out.state.begin(), out.state.end(),
              row + static_cast<std::size_t>(a.type) * ds);
    if (a.type == ActionType::kStop) continue;

    const auto& targets = episode.action_targets(state, a);
    double rel_sum = 0.0, rel_max = 0.0, novel_rel_max = 0.0;
    int novel = 0;
    for (PaperId id : targets) {
      const double r = relevance(corpus.paper(id), q);
      rel_sum += r;
      rel_max = std::max(rel_max, r);
      if (!episode.queue().contains(id)) {
        ++novel;
        novel_rel_max = std::max(novel_rel_max, r);
      }
    }
    if (!targets.empty()) {
      row[own + 0] = rel_sum / static_cast<double>(targets.size());
      row[own + 1] = rel_max;
      row[own + 2] =
          static_cast<double>(novel) / static_cast<double>(targets.size());
    }
    row[own + 3] = std::log1p(static_cast<double>(novel)) / kLogCountScale;
    row[own + 4] = novel_rel_max;
    if (a.type == ActionType::kSearch) {
      const auto& spec = q.candidate_searches[a.index];
      row[own + 5] =
          static_cast<double>(keyword_overlap(spec.keywords, q.keywords)) /
          static_cast<double>(std::max<std::size_t>(1, q.keywords.size()));
    }
    row[own + 6] = std::find(state.actions_taken.begin(),
                             state.actions_taken.end(),
                             a) != state.actions_taken.end()
                       ? 1.0
                       : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------- models --

std::string to_string(ModelKind k) {
  return k == ModelKind::kLinear ? "linear" : "mlp";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "linear") return ModelKind::kLinear;
  if (s == "mlp") return ModelKind::kMlp;
  throw ConfigError("model", "expected 'linear' or 'mlp', got '" + s + "'");
}

std::size_t HeadShape::n_params() const {
  if (kind == ModelKind::kLinear) return static_cast<std::size_t>(in_dim) + 1;
  return static_cast<std::size_t>(hidden) * (in_dim + 2) + 1;
}

ScalarHead::ScalarHead(HeadShape shape)
    : shape_(shape), params_(shape.n_params(), 0.0) {
  if (shape.in_dim < 1) throw ConfigError("dims", "input dim must be >= 1");
  if (shape.kind == ModelKind::kMlp && shape.hidden < 1)
    throw ConfigError("hidden", "mlp needs hidden >= 1");
}

// MLP layout: W (hidden x in, row-major), c (hidden), v (hidden), b.
double ScalarHead::forward(std::span<const double> x) const {
  const std::size_t n = static_cast<std::size_t>(shape_.in_dim);
  if (shape_.kind == ModelKind::kLinear) {
    double s = params_[n];
    for (std::size_t i = 0; i < n; ++i) s += params_[i] * x[i];
    return s;
  }
  const std::size_t h = static_cast<std::size_t>(shape_.hidden);
  const double* w = params_.data();
  const double* c = w + h * n;
  const double* v = c + h;
  double out = v[h];
  for (std::size_t k = 0; k < h; ++k) {
    double z = c[k];
    for (std::size_t i = 0; i < n; ++i) z += w[k * n + i] * x[i];
    out += v[k] * std::tanh(z);
  }
  return out;
}

void ScalarHead::accumulate_grad(std::span<const double> x, double scale,
                                 std::span<double> grad) const {
  const std::size_t n = static_cast<std::size_t>(shape_.in_dim);
  if (shape_.kind == ModelKind::kLinear) {
    for (std::size_t i = 0; i < n; ++i) grad[i] += scale * x[i];
    grad[n] += scale;
    return;
  }
  const std::size_t h = static_cast<std::size_t>(shape_.hidden);
  const double* w = params_.data();
  const double* c = w + h * n;
  const double* v = c + h;
  double* gw = grad.data();
  double* gc = gw + h * n;
  double* gv = gc + h;
  for (std::size_t k = 0; k < h; ++k) {
    double z = c[k];
    for (std::size_t i = 0; i < n; ++i) z += w[k * n + i] * x[i];
    const double a = std::tanh(z);
    gv[k] += scale * a;
    const double dz = scale * v[k] * (1.0 - a * a);
    gc[k] += dz;
    for (std::size_t i = 0; i < n; ++i) gw[k * n + i] += dz * x[i];
  }
  gv[h] += scale;
}

void ScalarHead::randomize(Rng& rng, double scale) {
  for (double& p : params_) p = scale * (2.0 * uniform01(rng) - 1.0);
}

PolicyParams PolicyParams::zeros(const FeatureConfig& fc, ModelKind kind,
                                 int hidden) {
  fc.validate();
  return {fc, ScalarHead({kind, action_dim(fc),
                          kind == ModelKind::kMlp ? hidden : 0})};
}

ValueParams ValueParams::zeros(const FeatureConfig& fc, ModelKind kind,
                               int hidden) {
  fc.validate();
  return {fc, ScalarHead({kind, state_dim(fc),
                          kind == ModelKind::kMlp ? hidden : 0})};
}

ActionRows rows_of(const Transition& t) {
  const std::size_t dim = t.n_legal ? t.action_features.size() / t.n_legal : 0;
  return {t.action_features, t.n_legal, dim};
}

std::vector<double> action_scores(const PolicyParams& params,
                                  const ActionRows& f) {
  if (f.dim != static_cast<std::size_t>(params.head.shape().in_dim))
    throw ContractViolation("feature rows do not match policy input dim");
  std::vector<double> s(f.n_legal);
  for (std::size_t i = 0; i < f.n_legal; ++i)
    s[i] = params.head.forward(f.row(i));
  return s;
}

std::vector<double> softmax(std::span<const double> scores) {
  check_scores(scores);
  const double lse = log_sum_exp(scores);
  std::vector<double> p(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    p[i] = std::exp(scores[i] - lse);
  return p;
}

std::vector<double> action_dist(const PolicyParams& params,
                                const ActionRows& f) {
  if (f.n_legal == 0) throw ContractViolation("action_dist: no legal actions");
  return softmax(action_scores(params, f));
}

LogProbGrad logprob_and_grad(const PolicyParams& params,
                             const ActionRows& f, std::size_t action_index) {
  if (action_index >= f.n_legal)
    throw ContractViolation("logprob_and_grad: action not legal");
  const auto scores = action_scores(params, f);
  check_scores(scores);
  const double lse = log_sum_exp(scores);
  LogProbGrad out;
  out.logprob = scores[action_index] - lse;
  out.grad.assign(params.head.params().size(), 0.0);
  for (std::size_t b = 0; b < f.n_legal; ++b) {
    const double pb = std::exp(scores[b] - lse);
    const double coef = (b == action_index ? 1.0 : 0.0) - pb;
    params.head.accumulate_grad(f.row(b), coef, out.grad);
  }
  return out;
}

double logprob(const PolicyParams& params, const ActionRows& f,
               std::size_t action_index) {
  if (action_index >= f.n_legal)
    throw ContractViolation("logprob: action not legal");
  const auto scores = action_scores(params, f);
  check_scores(scores);
  return scores[action_index] - log_sum_exp(scores);
}

double value(const ValueParams& params, std::span<const double> state) {
  return params.head.forward(state);
}

std::vector<double> value_grad(const ValueParams& params,
                               std::span<const double> state) {
  std::vector<double> g(params.head.params().size(), 0.0);
  params.head.accumulate_grad(state, 1.0, g);
  return g;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  return kl;
}

std::size_t sample_action(std::span<const double> dist, Rng& rng) {
  const double u = uniform01(rng);
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] <= 0.0) continue;
    cum += dist[i];
    last_positive = i;
    if (u < cum) return i;
  }
  return last_positive;
}

std::size_t greedy_action(std::span<const double> dist) {
  return static_cast<std::size_t>(
      std::max_element(dist.begin(), dist.end()) - dist.begin());
}

Choice PolicyChooser::choose(const Episode& episode, const AgentState& state,
                             std::span<const Action> legal, Rng& rng,
                             Transition* record) const {
  const PolicyParams& p = policy_.params();
  Features f = featurize(episode, state, legal, p.features);
  const auto scores = action_scores(p, f.rows());
  const auto dist = softmax(scores);
  const std::size_t idx = greedy_ ? greedy_action(dist) : sample_action(dist, rng);
  Choice c{idx, scores[idx] - log_sum_exp(scores)};
  if (record != nullptr) {
    record->action_features = std::move(f.actions);
    record->state_features = std::move(f.state);
  }
  return c;
}

// ------------------------------------------------------------ checkpoint --

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  using ojson = nlohmann::ordered_json;
  const HeadShape& ps = ckpt.policy.head.shape();
  const HeadShape& vs = ckpt.value.head.shape();
  const auto pp = ckpt.policy.head.params();
  const auto vp = ckpt.value.head.params();
  ojson j{{"model", to_string(ps.kind)},
          {"dims", {ps.in_dim, vs.in_dim, ps.hidden}},
          {"step", ckpt.step},
          {"hist_buckets", ckpt.policy.features.hist_buckets},
          {"policy", std::vector<double>(pp.begin(), pp.end())},
          {"value", std::vector<double>(vp.begin(), vp.end())}};
  return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const ModelKind kind = parse_model_kind(j.at("model").get<std::string>());
    const auto dims = j.at("dims").get<std::vector<int>>();
    if (dims.size() != 3) throw DataError("checkpoint dims must have 3 entries");
    FeatureConfig fc{j.at("hist_buckets").get<int>()};
    Checkpoint c{PolicyParams::zeros(fc, kind, dims[2]),
                 ValueParams::zeros(fc, kind, dims[2]),
                 j.at("step").get<long>()};
    if (c.policy.head.shape().in_dim != dims[0] ||
        c.value.head.shape().in_dim != dims[1])
      throw DataError("checkpoint dims do not match hist_buckets");
    const auto pp = j.at("policy").get<std::vector<double>>();
    const auto vp = j.at("value").get<std::vector<double>>();
    if (pp.size() != c.policy.head.params().size() ||
        vp.size() != c.value.head.params().size())
      throw DataError("checkpoint parameter count mismatch");
    std::copy(pp.begin(), pp.end(), c.policy.head.params().begin());
    std::copy(vp.begin(), vp.end(), c.value.head.params().begin());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << checkpoint_to_json(ckpt) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace pasa
