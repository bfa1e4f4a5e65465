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

#include "pasa/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace pasa {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') &&
      s.back() == s.front())
    s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::string body = trim(s);
  if (!body.empty() && body.front() == '[' && body.back() == ']')
    body = body.substr(1, body.size() - 2);
  std::stringstream ss(body);
  while (std::getline(ss, cur, ','))
    if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

// Typed access to a parsed tree that remembers which keys were consumed.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) {
    consumed_.insert(key);
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void str(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }

  template <typename T>
  void num(const std::string& key, T& out) {
    auto v = raw(key);
    if (!v) return;
    out = parse_num<T>(key, *v);
  }

  void flag(const std::string& key, bool& out) {
    auto v = raw(key);
    if (!v) return;
    if (*v == "true" || *v == "1") out = true;
    else if (*v == "false" || *v == "0") out = false;
    else throw ConfigError(key, "expected true or false, got '" + *v + "'");
  }

  template <typename T>
  void list(const std::string& key, std::vector<T>& out) {
    auto v = raw(key);
    if (!v) return;
    out.clear();
    for (const std::string& item : split_list(*v))
      out.push_back(parse_num<T>(key, item));
  }

  void strings(const std::string& key, std::vector<std::string>& out) {
    if (auto v = raw(key)) out = split_list(*v);
  }

  void required_seed(const std::string& key, std::uint64_t& out) {
    auto v = raw(key);
    if (!v) throw ConfigError(key, "seed is required");
    out = parse_num<std::uint64_t>(key, *v);
  }

  // ConfigError on any key that no reader consumed.
  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty()) {
        throw ConfigError(section, "top-level keys must sit in a section");
      }
      for (const auto& kv : body) {
        const std::string key = section + "." + kv.first;
        if (!consumed_.count(key)) throw ConfigError(key, "unknown key");
      }
    }
  }

 private:
  template <typename T>
  static T parse_num(const std::string& key, const std::string& s) {
    T v{};
    const char* end = s.data() + s.size();
    auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end)
      throw ConfigError(key, "cannot parse '" + s + "' as a number");
    return v;
  }

  const pt::ptree& tree_;
  std::set<std::string> consumed_;
};

SelectorMode parse_selector_mode(const std::string& s) {
  if (s == "exact") return SelectorMode::kExact;
  if (s == "noisy") return SelectorMode::kNoisy;
  throw ConfigError("selector.mode", "expected exact or noisy, got '" + s + "'");
}

IndicatorMode parse_indicator(const std::string& s) {
  if (s == "selector-or-answer") return IndicatorMode::kSelectorOrAnswer;
  if (s == "answer-only") return IndicatorMode::kAnswerOnly;
  throw ConfigError("reward.indicator",
                    "expected selector-or-answer or answer-only, got '" + s +
                        "'");
}

}  // namespace

std::string RunConfig::resolve(const std::string& p) const {
  if (p.empty()) return p;
  const fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path.string();
  return (fs::path(base_dir) / path).lexically_normal().string();
}

void RunConfig::validate() const {
  corpus.validate();
  queries.validate();
  if (n_train_queries < 0) throw ConfigError("queries.n_train", "must be >= 0");
  if (n_eval_queries < 0) throw ConfigError("queries.n_eval", "must be >= 0");
  selector.validate();
  reward.validate();
  ppo.validate();
  limits.validate();
  model.features.validate();
  if (model.kind == ModelKind::kMlp && model.hidden < 1)
    throw ConfigError("model.hidden", "must be >= 1");
  if (bc.epochs < 0) throw ConfigError("bc.epochs", "must be >= 0");
  if (!(bc.learning_rate > 0.0))
    throw ConfigError("bc.learning_rate", "must be > 0");
  if (!(bc.demo.other_section_prob >= 0.0 && bc.demo.other_section_prob <= 1.0))
    throw ConfigError("bc.other_section_prob", "must be in [0, 1]");
  for (int k : eval.ks)
    if (k < 0) throw ConfigError("eval.ks", "entries must be >= 0");
  if (ensemble_runs < 1) throw ConfigError("eval.ensemble_runs", "must be >= 1");
  if (checkpoint_every < 0)
    throw ConfigError("ppo.checkpoint_every", "must be >= 0");
  for (const std::string& v : ablate_variants)
    if (std::find(ablation_variants().begin(), ablation_variants().end(), v) ==
        ablation_variants().end())
      throw ConfigError("ablate.variants", "unknown variant '" + v + "'");
}

RunConfig parse_run_config(const std::string& text,
                           const std::string& base_dir,
                           const ConfigOverrides& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw DataError(std::string("config parse error: ") + e.what());
  }
  for (const auto& [key, value] : overrides) {
    if (key.find('.') == std::string::npos)
      throw UsageError("override '" + key + "' must look like section.key");
    tree.put(pt::ptree::path_type(key, '.'), value);
  }

  RunConfig c;
  c.base_dir = base_dir;
  Reader r(tree);

  r.str("paths.corpus", c.corpus_path);
  r.str("paths.train_queries", c.train_queries_path);
  r.str("paths.eval_queries", c.eval_queries_path);
  r.str("paths.sft_checkpoint", c.sft_checkpoint_path);
  r.str("paths.checkpoint", c.checkpoint_path);
  r.str("paths.output_dir", c.output_dir);

  r.required_seed("seeds.corpus", c.corpus_seed);
  r.required_seed("seeds.queries", c.query_seed);
  r.required_seed("seeds.train", c.train_seed);
  r.required_seed("seeds.eval", c.eval_seed);

  r.num("corpus.n_papers", c.corpus.n_papers);
  r.num("corpus.n_topics", c.corpus.n_topics);
  r.num("corpus.keywords_per_topic", c.corpus.keywords_per_topic);
  r.num("corpus.min_keywords", c.corpus.min_keywords);
  r.num("corpus.max_keywords", c.corpus.max_keywords);
  r.num("corpus.max_topics_per_paper", c.corpus.max_topics_per_paper);
  r.num("corpus.min_sections", c.corpus.min_sections);
  r.num("corpus.max_sections", c.corpus.max_sections);
  r.num("corpus.citation_fanout", c.corpus.citation_fanout);
  r.num("corpus.date_horizon", c.corpus.date_horizon);
  r.num("corpus.same_topic_bias", c.corpus.same_topic_bias);

  r.num("queries.n_train", c.n_train_queries);
  r.num("queries.n_eval", c.n_eval_queries);
  r.num("queries.min_keywords", c.queries.min_keywords);
  r.num("queries.max_keywords", c.queries.max_keywords);
  r.num("queries.n_candidate_searches", c.queries.n_candidate_searches);
  r.num("queries.relevance_threshold", c.queries.relevance_threshold);
  r.num("queries.min_date_fraction", c.queries.min_date_fraction);
  r.num("queries.max_answers", c.queries.max_answers);
  r.num("queries.max_retries", c.queries.max_retries);

  std::string mode = "exact";
  r.str("selector.mode", mode);
  c.selector.mode = parse_selector_mode(mode);
  r.num("selector.false_positive_rate", c.selector.false_positive_rate);
  r.num("selector.false_negative_rate", c.selector.false_negative_rate);
  r.num("selector.seed", c.selector.seed);

  r.num("reward.alpha", c.reward.alpha);
  r.num("reward.cost_search", c.reward.cost_search);
  r.num("reward.cost_expand", c.reward.cost_expand);
  r.num("reward.cost_stop", c.reward.cost_stop);
  std::string indicator = "selector-or-answer";
  r.str("reward.indicator", indicator);
  c.reward.indicator = parse_indicator(indicator);

  r.num("ppo.gamma0", c.ppo.gamma0);
  r.num("ppo.gamma1", c.ppo.gamma1);
  r.num("ppo.beta", c.ppo.beta);
  r.num("ppo.epsilon", c.ppo.epsilon);
  r.num("ppo.eta", c.ppo.eta);
  r.num("ppo.learning_rate", c.ppo.learning_rate);
  r.num("ppo.epochs_per_step", c.ppo.epochs_per_step);
  r.num("ppo.queries_per_step", c.ppo.queries_per_step);
  r.num("ppo.expand_sessions_per_wave", c.ppo.expand_sessions_per_wave);
  r.num("ppo.policy_freeze_steps", c.ppo.policy_freeze_steps);
  r.num("ppo.total_steps", c.ppo.total_steps);
  r.flag("ppo.normalize_advantages", c.ppo.normalize_advantages);
  r.num("ppo.checkpoint_every", c.checkpoint_every);

  r.num("limits.depth_limit", c.limits.depth_limit);
  r.num("limits.max_sessions", c.limits.max_sessions);
  r.num("limits.max_actions_per_session", c.limits.max_actions_per_session);
  r.num("limits.search_limit", c.limits.search_limit);
  r.flag("limits.allow_expand", c.limits.allow_expand);

  std::string kind = "linear";
  r.str("model.kind", kind);
  c.model.kind = parse_model_kind(kind);
  r.num("model.hidden", c.model.hidden);
  r.num("model.hist_buckets", c.model.features.hist_buckets);

  r.num("bc.queries", c.bc.queries);
  r.num("bc.epochs", c.bc.epochs);
  r.num("bc.learning_rate", c.bc.learning_rate);
  r.num("bc.expand_papers_per_query", c.bc.demo.expand_papers_per_query);
  r.num("bc.other_section_prob", c.bc.demo.other_section_prob);

  r.list("eval.ks", c.eval.ks);
  r.flag("eval.greedy", c.eval.greedy);
  r.num("eval.ensemble_runs", c.ensemble_runs);

  r.strings("ablate.variants", c.ablate_variants);
  r.list("ablate.alphas", c.alphas);
  r.list("ablate.costs", c.costs);

  r.reject_unknown();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path,
                          const ConfigOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const fs::path parent = fs::path(path).parent_path();
  return parse_run_config(ss.str(), parent.empty() ? "." : parent.string(),
                          overrides);
}

void require_file(const std::string& path, const std::string& field) {
  if (path.empty()) throw UsageError("missing " + field);
  if (!fs::exists(path))
    throw DataError(field + " '" + path + "' does not exist");
}

}  // namespace pasa
