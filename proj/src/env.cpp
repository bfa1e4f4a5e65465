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

#include "pasa/env.hpp"

#include <algorithm>
#include <ostream>

#include "json.hpp"

namespace pasa {

std::string to_string(const Action& a) {
  switch (a.type) {
    case ActionType::kSearch:
      return "search:" + std::to_string(a.index);
    case ActionType::kExpand:
      return "expand:" + std::to_string(a.index);
    case ActionType::kStop:
      break;
  }
  return "stop";
}

Action parse_action(const std::string& s) {
  if (s == "stop") return Action::stop();
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw DataError("bad action '" + s + "'");
  const std::string head = s.substr(0, colon);
  int index = 0;
  try {
    index = std::stoi(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw DataError("bad action index in '" + s + "'");
  }
  if (head == "search") return Action::search(index);
  if (head == "expand") return Action::expand(index);
  throw DataError("bad action '" + s + "'");
}

std::string to_string(SessionKind k) {
  return k == SessionKind::kQuery ? "S_q" : "S_q+p";
}

// ------------------------------------------------------------------ queue --

bool PaperQueue::push(PaperId id, int depth) {
  if (!position_.emplace(id, entries_.size()).second) return false;
  entries_.push_back({id, depth});
  return true;
}

std::size_t PaperQueue::position(PaperId id) const {
  auto it = position_.find(id);
  return it == position_.end() ? entries_.size() : it->second;
}

std::vector<PaperId> PaperQueue::ids() const {
  std::vector<PaperId> out;
  out.reserve(entries_.size());
  for (const Entry& e : entries_) out.push_back(e.id);
  return out;
}

QueueView PaperQueue::prefix(std::size_t n) const {
  return QueueView(this, std::min(n, entries_.size()));
}

QueueView PaperQueue::view() const { return QueueView(this, entries_.size()); }

void EnvLimits::validate() const {
  if (depth_limit < 1) throw ConfigError("depth_limit", "must be >= 1");
  if (max_sessions < 1) throw ConfigError("max_sessions", "must be >= 1");
  if (max_actions_per_session < 1)
    throw ConfigError("max_actions_per_session", "must be >= 1");
  if (search_limit < 1) throw ConfigError("search_limit", "must be >= 1");
}

// ------------------------------------------------------------------ tools --

std::vector<PaperId> search(const Corpus& corpus, const SearchSpec& spec,
                            Day query_date, int limit) {
  if (limit < 1) throw ContractViolation("search: limit must be >= 1");
  struct Hit {
    int score;
    PaperId id;
  };
  std::vector<Hit> hits;
  for (const Paper& p : corpus.papers()) {
    if (p.pub_date >= query_date) continue;
    const int s = keyword_overlap(p.keywords, spec.keywords);
    if (s > 0) hits.push_back({s, p.id});
  }
  const auto by_rank = [](const Hit& a, const Hit& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  };
  const std::size_t n = std::min<std::size_t>(hits.size(), limit);
  std::partial_sort(hits.begin(), hits.begin() + n, hits.end(), by_rank);
  std::vector<PaperId> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(hits[i].id);
  return out;
}

const std::vector<PaperId>& expand(const Corpus& corpus, PaperId paper_id,
                                   int section_index) {
  const Paper& p = corpus.paper(paper_id);
  if (section_index < 0 ||
      section_index >= static_cast<int>(p.sections.size()))
    throw LookupError("paper " + std::to_string(paper_id) +
                      " has no section " + std::to_string(section_index));
  return p.sections[section_index].cited;
}

std::vector<Action> legal_actions(const Corpus& corpus,
                                  const AgentState& state,
                                  const EnvLimits& limits) {
  std::vector<Action> out;
  const bool at_cap = static_cast<int>(state.actions_taken.size()) + 1 >=
                      limits.max_actions_per_session;
  if (!at_cap) {
    if (state.kind == SessionKind::kQuery) {
      const int k = static_cast<int>(state.query->candidate_searches.size());
      for (int i = 0; i < k; ++i) out.push_back(Action::search(i));
    } else if (limits.allow_expand && state.depth < limits.depth_limit) {
      const Paper& p = corpus.paper(*state.current_paper);
      for (int j = 0; j < static_cast<int>(p.sections.size()); ++j)
        out.push_back(Action::expand(j));
    }
  }
  out.push_back(Action::stop());
  return out;
}

// ---------------------------------------------------------------- episode --

Episode::Episode(const Corpus& corpus, const Query& query, EnvLimits limits)
    : corpus_(&corpus),
      query_(&query),
      limits_(limits),
      search_cache_(query.candidate_searches.size()) {
  limits_.validate();
  for (std::size_t i = 0; i < query.candidate_searches.size(); ++i)
    search_cache_[i] = pasa::search(corpus, query.candidate_searches[i],
                                    query.query_date, limits_.search_limit);
}

AgentState Episode::query_state() const {
  AgentState s;
  s.query = query_;
  s.kind = SessionKind::kQuery;
  s.depth = 0;
  return s;
}

AgentState Episode::paper_state(PaperId paper, int depth) const {
  corpus_->paper(paper);  // lookup check
  AgentState s;
  s.query = query_;
  s.kind = SessionKind::kQueryPaper;
  s.current_paper = paper;
  s.depth = depth;
  return s;
}

std::vector<Action> Episode::legal_actions(const AgentState& state) const {
  return pasa::legal_actions(*corpus_, state, limits_);
}

const std::vector<PaperId>& Episode::search_results(int spec_index) const {
  return search_cache_.at(spec_index);
}

const std::vector<PaperId>& Episode::action_targets(
    const AgentState& state, const Action& action) const {
  static const std::vector<PaperId> kNone;
  switch (action.type) {
    case ActionType::kSearch:
      return search_results(action.index);
    case ActionType::kExpand:
      return pasa::expand(*corpus_, *state.current_paper, action.index);
    case ActionType::kStop:
      break;
  }
  return kNone;
}

StepOutcome Episode::step(AgentState& state, const Action& action) {
  const auto legal = legal_actions(state);
  if (std::find(legal.begin(), legal.end(), action) == legal.end())
    throw ContractViolation("illegal action " + to_string(action) + " in " +
                            to_string(state.kind) + " state");
  StepOutcome out;
  state.actions_taken.push_back(action);
  if (action.type == ActionType::kStop) {
    out.session_done = true;
    state.last_new_papers = 0;
    return out;
  }
  for (PaperId id : action_targets(state, action))
    if (queue_.push(id, state.depth + 1)) out.new_papers.push_back(id);
  state.last_new_papers = static_cast<int>(out.new_papers.size());
  if (!out.new_papers.empty()) ++state.productive_actions;
  return out;
}

bool well_formed(const Session& session) {
  const auto& ts = session.transitions;
  if (ts.empty() || ts.back().action.type != ActionType::kStop) return false;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    if (ts[i].action.type == ActionType::kStop) return false;
  return true;
}

Session run_session(const ActionChooser& chooser, Episode& episode,
                    AgentState start, Rng& rng, const StepRecorder* recorder) {
  Session session;
  session.kind = start.kind;
  session.paper = start.current_paper;
  session.depth = start.depth;
  AgentState state = std::move(start);
  for (;;) {
    const auto legal = episode.legal_actions(state);
    Transition t;
    const Choice c = chooser.choose(episode, state, legal, rng, &t);
    if (c.index >= legal.size())
      throw ContractViolation("chooser returned index out of range");
    t.action = legal[c.index];
    t.action_index = c.index;
    t.n_legal = legal.size();
    t.logprob_old = c.logprob;
    t.depth = state.depth;
    t.queue_size_before = episode.queue().size();
    const AgentState before = state;
    StepOutcome out = episode.step(state, t.action);
    t.new_papers = std::move(out.new_papers);
    if (recorder != nullptr) recorder->after_step(episode, before, t);
    session.transitions.push_back(std::move(t));
    if (out.session_done) break;
  }
  session.terminal = true;
  return session;
}

CrawlResult run_crawler(const ActionChooser& chooser, const Query& query,
                        const Corpus& corpus, const EnvLimits& limits,
                        Rng& rng, const StepRecorder* recorder) {
  Episode episode(corpus, query, limits);
  CrawlResult result;
  result.sessions.push_back(
      run_session(chooser, episode, episode.query_state(), rng, recorder));
  while (episode.queue().has_next()) {
    if (static_cast<int>(result.sessions.size()) >= limits.max_sessions) {
      result.truncated = true;
      break;
    }
    const PaperQueue::Entry e = episode.queue().next();
    result.sessions.push_back(run_session(
        chooser, episode, episode.paper_state(e.id, e.depth), rng, recorder));
  }
  result.queue = std::move(episode.queue());
  return result;
}

void write_rollout_trace(std::ostream& out,
                         const std::vector<Session>& sessions,
                         std::optional<std::int64_t> query_id) {
  using ojson = nlohmann::ordered_json;
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    for (const Transition& t : sessions[s].transitions) {
      ojson rec{{"session_idx", s},
                {"kind", to_string(sessions[s].kind)},
                {"action", to_string(t.action)},
                {"new_papers", t.new_papers},
                {"logprob_old", t.logprob_old}};
      if (query_id) rec["query_id"] = *query_id;
      out << rec.dump() << '\n';
    }
  }
}

}  // namespace pasa
