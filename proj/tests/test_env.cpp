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

#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pasa/env.hpp"
#include "pasa/policy.hpp"
#include "test_util.hpp"

using namespace pasa;
using testing::tiny_corpus;
using testing::tiny_query;

TEST_CASE("search ranks by overlap then id and filters by date") {
  const Corpus c = tiny_corpus();
  CHECK(search(c, {{1, 2}, ""}, 50, 10) == std::vector<PaperId>{1, 2, 3});
  CHECK(search(c, {{1, 2}, ""}, 500, 10) == std::vector<PaperId>{1, 5, 2, 3});
  CHECK(search(c, {{1, 2}, ""}, 50, 2) == std::vector<PaperId>{1, 2});
  CHECK(search(c, {{77}, ""}, 500, 10).empty());
  CHECK(search(c, {{1, 2}, ""}, 10, 10).empty());
}

TEST_CASE("search agrees with a brute-force scorer") {
  CorpusConfig cc;
  cc.n_papers = 300;
  const Corpus c = gen_corpus(cc, 21);
  const SearchSpec spec{{0, 1, 2, 13}, ""};
  std::vector<std::pair<int, PaperId>> scored;
  for (const Paper& p : c.papers()) {
    const int o = keyword_overlap(p.keywords, spec.keywords);
    if (o > 0 && p.pub_date < 3000) scored.push_back({-o, p.id});
  }
  std::sort(scored.begin(), scored.end());
  std::vector<PaperId> expected;
  for (std::size_t i = 0; i < scored.size() && i < 10; ++i)
    expected.push_back(scored[i].second);
  CHECK(search(c, spec, 3000, 10) == expected);
}

TEST_CASE("expand reads a section's citations") {
  const Corpus c = tiny_corpus();
  CHECK(expand(c, 3, 0) == std::vector<PaperId>{1, 2});
  CHECK(expand(c, 3, 1).empty());
  CHECK_THROWS_AS(expand(c, 3, 3), LookupError);
  CHECK_THROWS_AS(expand(c, 3, -1), LookupError);
  CHECK_THROWS_AS(expand(c, 99, 0), LookupError);
}

TEST_CASE("legal action counts") {
  const Corpus c = tiny_corpus();
  Query q = tiny_query(c);
  q.candidate_searches.resize(8, {{1}, "pad"});
  Episode ep(c, q, {});
  CHECK(ep.legal_actions(ep.query_state()).size() == 9);
  CHECK(ep.legal_actions(ep.paper_state(3, 1)).size() == 4);
  const auto at_limit = ep.legal_actions(ep.paper_state(3, 3));
  REQUIRE(at_limit.size() == 1);
  CHECK(at_limit[0] == Action::stop());
  CHECK(ep.legal_actions(ep.paper_state(1, 1)).size() == 1);

  EnvLimits no_expand;
  no_expand.allow_expand = false;
  Episode ne(c, q, no_expand);
  CHECK(ne.legal_actions(ne.paper_state(3, 1)).size() == 1);
}

TEST_CASE("the last action slot only allows Stop") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  EnvLimits lim;
  lim.max_actions_per_session = 3;
  Episode ep(c, q, lim);
  AgentState s = ep.query_state();
  ep.step(s, Action::search(2));
  CHECK(ep.legal_actions(s).size() == 4);
  ep.step(s, Action::search(2));
  CHECK(ep.legal_actions(s) == std::vector<Action>{Action::stop()});
}

TEST_CASE("step deduplicates against the queue") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  Episode ep(c, q, {});
  ep.queue().push(1, 1);
  ep.queue().push(3, 1);
  AgentState s = ep.query_state();
  const StepOutcome a = ep.step(s, Action::search(0));
  CHECK(a.new_papers == std::vector<PaperId>{2});
  CHECK_FALSE(a.session_done);
  const StepOutcome again = ep.step(s, Action::search(0));
  CHECK(again.new_papers.empty());
  const StepOutcome stop = ep.step(s, Action::stop());
  CHECK(stop.new_papers.empty());
  CHECK(stop.session_done);

  AgentState p = ep.paper_state(3, 1);
  CHECK(ep.step(p, Action::expand(0)).new_papers.empty());
}

TEST_CASE("illegal actions are contract violations") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  Episode ep(c, q, {});
  AgentState s = ep.query_state();
  CHECK_THROWS_AS(ep.step(s, Action::expand(0)), ContractViolation);
  CHECK_THROWS_AS(ep.step(s, Action::search(3)), ContractViolation);
  AgentState p = ep.paper_state(3, 3);
  CHECK_THROWS_AS(ep.step(p, Action::expand(0)), ContractViolation);
}

TEST_CASE("always-Stop crawler yields one session and an empty queue") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  Rng rng(1);
  const CrawlResult r = run_crawler(testing::always_stop(), q, c, {}, rng);
  CHECK(r.queue.empty());
  REQUIRE(r.sessions.size() == 1);
  CHECK(well_formed(r.sessions[0]));
  CHECK_FALSE(r.truncated);
}

TEST_CASE("take-everything crawler matches a hand BFS trace") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  Rng rng(1);
  const CrawlResult r = run_crawler(testing::take_everything(), q, c, {}, rng);
  CHECK(r.queue.ids() == std::vector<PaperId>{1, 2, 3, 4, 6, 7});
  std::vector<int> depths;
  for (const auto& e : r.queue.entries()) depths.push_back(e.depth);
  CHECK(depths == std::vector<int>{1, 1, 1, 1, 2, 3});
  CHECK(r.sessions.size() == 7);
  for (const Session& s : r.sessions) CHECK(well_formed(s));
  CHECK(r.sessions[0].transitions.size() == 4);  // three searches and Stop
}

TEST_CASE("depth limit masks deeper expansions") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  EnvLimits lim;
  lim.depth_limit = 2;
  Rng rng(1);
  CHECK(run_crawler(testing::take_everything(), q, c, lim, rng).queue.ids() ==
        std::vector<PaperId>{1, 2, 3, 4, 6});
  lim.depth_limit = 1;
  CHECK(run_crawler(testing::take_everything(), q, c, lim, rng).queue.ids() ==
        std::vector<PaperId>{1, 2, 3, 4});
}

TEST_CASE("max_sessions truncates gracefully") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  EnvLimits lim;
  lim.max_sessions = 2;
  Rng rng(1);
  const CrawlResult r = run_crawler(testing::take_everything(), q, c, lim, rng);
  CHECK(r.sessions.size() == 2);
  CHECK(r.truncated);
}

TEST_CASE("policy rollouts keep the queue unique and are deterministic") {
  CorpusConfig cc;
  cc.n_papers = 400;
  const Corpus c = gen_corpus(cc, 31);
  const auto qs = gen_queries(c, 5, 32);
  Rng init(3);
  PolicyParams params = PolicyParams::zeros({}, ModelKind::kLinear);
  params.head.randomize(init, 0.5);
  const PolicyChooser chooser{PolicySnapshot(params)};
  for (const Query& q : qs) {
    Rng a(99), b(99);
    const CrawlResult ra = run_crawler(chooser, q, c, {}, a);
    const CrawlResult rb = run_crawler(chooser, q, c, {}, b);
    const auto ids = ra.queue.ids();
    CHECK(std::set<PaperId>(ids.begin(), ids.end()).size() == ids.size());
    CHECK(ids == rb.queue.ids());
    REQUIRE(ra.sessions.size() == rb.sessions.size());
    std::size_t seen = 0;
    for (std::size_t s = 0; s < ra.sessions.size(); ++s) {
      CHECK(well_formed(ra.sessions[s]));
      for (std::size_t t = 0; t < ra.sessions[s].transitions.size(); ++t) {
        const Transition& x = ra.sessions[s].transitions[t];
        CHECK(x.action == rb.sessions[s].transitions[t].action);
        CHECK(x.queue_size_before >= seen);  // membership only grows
        seen = x.queue_size_before + x.new_papers.size();
      }
    }
  }
}

TEST_CASE("rollout trace lines carry the contract fields") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  Rng rng(1);
  const CrawlResult r = run_crawler(testing::take_everything(), q, c, {}, rng);
  std::ostringstream os;
  write_rollout_trace(os, r.sessions, q.id);
  std::istringstream in(os.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key :
         {"session_idx", "kind", "action", "new_papers", "logprob_old", "query_id"})
      CHECK(j.contains(key));
    if (n == 0) {
      CHECK(j["kind"] == "S_q");
      CHECK(j["action"] == "search:0");
      CHECK(j["new_papers"] == nlohmann::json::array({1, 2, 3}));
    }
    ++n;
  }
  std::size_t total = 0;
  for (const Session& s : r.sessions) total += s.transitions.size();
  CHECK(n == static_cast<int>(total));
}

TEST_CASE("action strings round-trip") {
  for (const Action a : {Action::search(3), Action::expand(0), Action::stop()})
    CHECK(parse_action(to_string(a)) == a);
  CHECK_THROWS(parse_action("jump:1"));
}
