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

#include "doctest.h"
#include "pasa/selector.hpp"
#include "test_util.hpp"

using namespace pasa;
using testing::tiny_corpus;
using testing::tiny_query;

TEST_CASE("exact selector accepts answers only") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  const Decision yes = select(SelectorModel::exact(), c, q, 3);
  CHECK(yes.accept);
  CHECK(yes.score == 1.0);
  const Decision no = select(SelectorModel::exact(), c, q, 4);
  CHECK_FALSE(no.accept);
  CHECK(no.score == 0.0);
  CHECK_THROWS_AS(select(SelectorModel::exact(), c, q, 999), LookupError);
}

TEST_CASE("noisy false-positive rate over 10k non-answer pairs") {
  CorpusConfig cc;
  cc.n_papers = 2000;
  const Corpus c = gen_corpus(cc, 5);
  const auto qs = gen_queries(c, 8, 6);
  const SelectorModel m = SelectorModel::noisy(0.05, 0.0, 77);
  int pairs = 0, accepted = 0;
  for (const Query& q : qs)
    for (const Paper& p : c.papers()) {
      if (q.is_answer(p.id)) continue;
      if (pairs == 10000) break;
      ++pairs;
      accepted += select(m, c, q, p.id).accept;
    }
  REQUIRE(pairs == 10000);
  CHECK(std::abs(accepted / 10000.0 - 0.05) <= 0.01);
}

TEST_CASE("noisy false-negative rate and reproducibility") {
  CorpusConfig cc;
  cc.n_papers = 2000;
  const Corpus c = gen_corpus(cc, 5);
  const auto qs = gen_queries(c, 60, 6);
  const SelectorModel m = SelectorModel::noisy(0.0, 0.2, 8);
  int n = 0, rejected = 0;
  for (const Query& q : qs)
    for (PaperId id : q.answers) {
      ++n;
      const Decision d = select(m, c, q, id);
      rejected += !d.accept;
      CHECK(d.accept == select(m, c, q, id).accept);
      CHECK(d.score == select(m, c, q, id).score);
      CHECK((d.score >= 0.5) == d.accept);
    }
  REQUIRE(n > 500);
  CHECK(std::abs(static_cast<double>(rejected) / n - 0.2) <= 0.05);
}

TEST_CASE("indicator examples") {
  const Corpus c = tiny_corpus();
  const Query q = tiny_query(c);
  PaperQueue queue;
  const SelectorModel exact = SelectorModel::exact();
  CHECK(indicator(exact, c, q, 3, queue.view()) == 1);
  CHECK(indicator(exact, c, q, 4, queue.view()) == 0);
  queue.push(3, 1);
  CHECK(indicator(exact, c, q, 3, queue.view()) == 0);
  CHECK(indicator(exact, c, q, 3, queue.prefix(0)) == 1);

  // A selector that rejects every answer still counts answers.
  const SelectorModel deaf = SelectorModel::noisy(0.0, 1.0, 1);
  CHECK_FALSE(select(deaf, c, q, 2).accept);
  CHECK(indicator(deaf, c, q, 2, PaperQueue{}.view()) == 1);
  CHECK(indicator(deaf, c, q, 2, PaperQueue{}.view(), IndicatorMode::kAnswerOnly) == 1);

  // A selector that accepts everything counts non-answers unless answer-only.
  const SelectorModel eager = SelectorModel::noisy(1.0, 0.0, 1);
  CHECK(indicator(eager, c, q, 4, PaperQueue{}.view()) == 1);
  CHECK(indicator(eager, c, q, 4, PaperQueue{}.view(), IndicatorMode::kAnswerOnly) == 0);
}

TEST_CASE("indicator properties over a generated corpus") {
  CorpusConfig cc;
  cc.n_papers = 300;
  const Corpus c = gen_corpus(cc, 14);
  const auto qs = gen_queries(c, 4, 15);
  const SelectorModel noisy = SelectorModel::noisy(0.1, 0.1, 3);
  for (const Query& q : qs) {
    PaperQueue queue;
    for (const Paper& p : c.papers()) {
      const bool answer = q.is_answer(p.id);
      CHECK(indicator(SelectorModel::exact(), c, q, p.id, queue.view()) == answer);
      const int before = indicator(noisy, c, q, p.id, queue.view());
      if (p.id % 3 == 0) queue.push(p.id, 1);
      const int after = indicator(noisy, c, q, p.id, queue.view());
      CHECK(after <= before);
      if (queue.contains(p.id)) CHECK(after == 0);
    }
  }
}

TEST_CASE("selector config validation") {
  CHECK_THROWS_AS(SelectorModel::noisy(1.5, 0.0, 1).validate(), ConfigError);
  CHECK_THROWS_AS(SelectorModel::noisy(0.0, -0.1, 1).validate(), ConfigError);
  CHECK_NOTHROW(SelectorModel::noisy(0.05, 0.0, 1).validate());
}
