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

#ifndef PASA_ENV_HPP_
#define PASA_ENV_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pasa/common.hpp"
#include "pasa/corpus.hpp"

namespace pasa {

enum class ActionType { kSearch = 0, kExpand = 1, kStop = 2 };
inline constexpr int kNumActionTypes = 3;

struct Action {
  ActionType type = ActionType::kStop;
  int index = 0;  // spec index for Search, section index for Expand

  static Action search(int spec) { return {ActionType::kSearch, spec}; }
  static Action expand(int section) { return {ActionType::kExpand, section}; }
  static Action stop() { return {ActionType::kStop, 0}; }

  bool operator==(const Action&) const = default;
};

// "search:3", "expand:1", "stop".
std::string to_string(const Action& a);
Action parse_action(const std::string& s);

enum class SessionKind { kQuery, kQueryPaper };  // S_q, S_{q+p}
std::string to_string(SessionKind k);

// Membership test against the first `size` entries of a queue: the queue as
// it stood before some action.
class QueueView;

// Insertion-ordered, duplicate-free queue of discovered papers with a FIFO
// cursor.
class PaperQueue {
 public:
  struct Entry {
    PaperId id;
    int depth;
  };

  // False (and no change) when the id is already present.
  bool push(PaperId id, int depth);
  bool contains(PaperId id) const { return position_.count(id) != 0; }
  // Insertion index, or size() when absent.
  std::size_t position(PaperId id) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<PaperId> ids() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::size_t cursor() const { return cursor_; }
  bool has_next() const { return cursor_ < entries_.size(); }
  const Entry& next() { return entries_.at(cursor_++); }

  QueueView prefix(std::size_t n) const;
  QueueView view() const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<PaperId, std::size_t> position_;
  std::size_t cursor_ = 0;
};

class QueueView {
 public:
  QueueView() = default;
  QueueView(const PaperQueue* queue, std::size_t size)
      : queue_(queue), size_(size) {}
  bool contains(PaperId id) const {
    return queue_ != nullptr && queue_->position(id) < size_;
  }
  std::size_t size() const { return size_; }

 private:
  const PaperQueue* queue_ = nullptr;
  std::size_t size_ = 0;
};

struct EnvLimits {
  int depth_limit = 3;
  int max_sessions = 1000;
  int max_actions_per_session = 8;  // the last slot is always Stop
  int search_limit = 10;
  bool allow_expand = true;

  void validate() const;
};

struct AgentState {
  const Query* query = nullptr;
  SessionKind kind = SessionKind::kQuery;
  std::optional<PaperId> current_paper;  // present iff kind == kQueryPaper
  int depth = 0;
  std::vector<Action> actions_taken;
  int last_new_papers = 0;      // papers appended by the previous action
  int productive_actions = 0;   // actions this session that appended papers
};

// Top `limit` papers dated before `query_date` by descending keyword overlap
// with the spec, ties by ascending id. Papers with zero overlap are never
// returned.
std::vector<PaperId> search(const Corpus& corpus, const SearchSpec& spec,
                            Day query_date, int limit);

// The section's cited list in stored order; LookupError when the paper or
// section does not exist.
const std::vector<PaperId>& expand(const Corpus& corpus, PaperId paper_id,
                                   int section_index);

std::vector<Action> legal_actions(const Corpus& corpus,
                                  const AgentState& state,
                                  const EnvLimits& limits);

struct StepOutcome {
  std::vector<PaperId> new_papers;
  bool session_done = false;
};

// One query's world: corpus, query, limits, the shared paper queue and a
// cache of search results per candidate spec.
class Episode {
 public:
  Episode(const Corpus& corpus, const Query& query, EnvLimits limits);

  const Corpus& corpus() const { return *corpus_; }
  const Query& query() const { return *query_; }
  const EnvLimits& limits() const { return limits_; }
  PaperQueue& queue() { return queue_; }
  const PaperQueue& queue() const { return queue_; }

  AgentState query_state() const;
  AgentState paper_state(PaperId paper, int depth) const;

  std::vector<Action> legal_actions(const AgentState& state) const;

  // Papers the action would return before deduplication.
  const std::vector<PaperId>& action_targets(const AgentState& state,
                                             const Action& action) const;
  const std::vector<PaperId>& search_results(int spec_index) const;

  // Throws ContractViolation for illegal actions.
  StepOutcome step(AgentState& state, const Action& action);

 private:
  const Corpus* corpus_;
  const Query* query_;
  EnvLimits limits_;
  PaperQueue queue_;
  std::vector<std::vector<PaperId>> search_cache_;
};

// A logged decision. The feature snapshot, old log-probabilities and values
// are filled by whoever samples the action; reward, return and advantage by
// the trainer.
struct Transition {
  Action action;
  std::size_t action_index = 0;  // position of `action` in the legal list
  std::size_t n_legal = 0;
  std::vector<double> action_features;  // n_legal rows, row-major
  std::vector<double> state_features;
  std::vector<PaperId> new_papers;
  std::vector<std::vector<double>> spawn_features;  // S_{q+p_j} per new paper
  std::size_t queue_size_before = 0;
  int depth = 0;

  double reward = 0.0;
  double logprob_old = 0.0;
  double logprob_sft = 0.0;
  double value_old = 0.0;
  double ret = 0.0;
  double advantage = 0.0;
};

struct Session {
  SessionKind kind = SessionKind::kQuery;
  std::optional<PaperId> paper;
  int depth = 0;
  std::vector<Transition> transitions;
  bool terminal = false;
};

// True iff the last action is Stop and no earlier action is.
bool well_formed(const Session& session);

struct Choice {
  std::size_t index = 0;
  double logprob = 0.0;
};

// Chooses among legal actions. Implementations that own a feature model may
// fill `record`'s feature snapshot.
class ActionChooser {
 public:
  virtual ~ActionChooser() = default;
  virtual Choice choose(const Episode& episode, const AgentState& state,
                        std::span<const Action> legal, Rng& rng,
                        Transition* record) const = 0;
};

// Called after each step with the episode already updated.
class StepRecorder {
 public:
  virtual ~StepRecorder() = default;
  virtual void after_step(const Episode& episode, const AgentState& before,
                          Transition& transition) const = 0;
};

// Runs one session from `start` until Stop.
Session run_session(const ActionChooser& chooser, Episode& episode,
                    AgentState start, Rng& rng,
                    const StepRecorder* recorder = nullptr);

struct CrawlResult {
  PaperQueue queue;
  std::vector<Session> sessions;
  bool truncated = false;  // max_sessions reached with papers still queued
};

// One S_q session, then one S_{q+p} session per queued paper in FIFO order.
CrawlResult run_crawler(const ActionChooser& chooser, const Query& query,
                        const Corpus& corpus, const EnvLimits& limits,
                        Rng& rng, const StepRecorder* recorder = nullptr);

// JSON-lines trace, one transition per line:
// {session_idx, kind, action, new_papers, logprob_old}, plus query_id when
// given.
void write_rollout_trace(std::ostream& out,
                         const std::vector<Session>& sessions,
                         std::optional<std::int64_t> query_id = std::nullopt);

}  // namespace pasa

#endif  // PASA_ENV_HPP_
