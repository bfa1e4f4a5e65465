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

#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pasa/corpus.hpp"
#include "test_util.hpp"

using namespace pasa;

namespace {

std::string serialize(const Corpus& c) {
  std::ostringstream os;
  write_corpus(os, c);
  return os.str();
}

CorpusConfig small_config(int n) {
  CorpusConfig cc;
  cc.n_papers = n;
  return cc;
}

}  // namespace

TEST_CASE("gen_corpus with one paper has no citations") {
  const Corpus c = gen_corpus(small_config(1), 7);
  REQUIRE(c.size() == 1);
  for (const Section& s : c.papers()[0].sections) CHECK(s.cited.empty());
  CHECK(validate_corpus(c).ok());
}

TEST_CASE("generated corpora are valid DAGs with backward edges") {
  for (std::uint64_t seed : {42u, 43u, 44u}) {
    const Corpus c = gen_corpus(small_config(500), seed);
    CHECK(validate_corpus(c).ok());
    CHECK(citation_graph_is_dag(c));
    for (const Paper& p : c.papers())
      for (const Section& s : p.sections)
        for (PaperId id : s.cited) {
          REQUIRE(c.contains(id));
          CHECK(c.paper(id).pub_date < p.pub_date);
        }
  }
}

TEST_CASE("gen_corpus is deterministic") {
  CHECK(serialize(gen_corpus(small_config(300), 5)) ==
        serialize(gen_corpus(small_config(300), 5)));
  CHECK(serialize(gen_corpus(small_config(300), 5)) !=
        serialize(gen_corpus(small_config(300), 6)));
}

TEST_CASE("invalid corpus config names the field") {
  CorpusConfig cc;
  cc.n_papers = 0;
  try {
    gen_corpus(cc, 1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "n_papers");
  }
  cc = CorpusConfig{};
  cc.min_keywords = 7;
  CHECK_THROWS_AS(gen_corpus(cc, 1), ConfigError);
}

TEST_CASE("validator reports a missing citation target") {
  std::vector<Paper> papers = testing::tiny_corpus().papers();
  papers[1].sections[0].cited.push_back(999);
  const Corpus c(papers, {}, 0);
  const auto report = validate_corpus(c);
  CHECK_FALSE(report.ok());
  CHECK(report.mentions(999));
  CHECK(std::any_of(report.violations.begin(), report.violations.end(),
                    [](const Violation& v) { return v.kind == "missing-citation"; }));
}

TEST_CASE("validator reports a forward-in-time edge") {
  std::vector<Paper> papers = testing::tiny_corpus().papers();
  papers[0].sections.push_back({"late", {4}});  // paper 1 (day 10) cites day 40
  const Corpus c(papers, {}, 0);
  const auto report = validate_corpus(c);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const Violation& v : report.violations)
    if (v.kind == "forward-edge") {
      found = true;
      CHECK(std::find(v.ids.begin(), v.ids.end(), 1) != v.ids.end());
      CHECK(std::find(v.ids.begin(), v.ids.end(), 4) != v.ids.end());
    }
  CHECK(found);
}

TEST_CASE("validator reports duplicate section names") {
  std::vector<Paper> papers = testing::tiny_corpus().papers();
  papers[2].sections[1].name = "intro";
  CHECK_FALSE(validate_corpus(Corpus(papers, {}, 0)).ok());
}

TEST_CASE("answer_set picks exactly the planted papers") {
  const Corpus c = testing::tiny_corpus();
  CHECK(answer_set(c, {1, 2}, 50, 0.5) == std::vector<PaperId>{1, 2, 3});
  CHECK(answer_set(c, {1, 2}, 200, 0.5) == std::vector<PaperId>{1, 2, 3, 5});
  CHECK(answer_set(c, {1, 2}, 200, 1.0) == std::vector<PaperId>{1, 5});
  CHECK(answer_set(c, {1, 2}, 1, 0.5).empty());
}

TEST_CASE("make_query rejects a date before every paper") {
  const Corpus c = testing::tiny_corpus();
  Rng rng(1);
  CHECK_THROWS_AS(make_query(c, 0, {1, 2}, 1, QueryConfig{}, rng),
                  GenerationError);
}

TEST_CASE("gen_queries answers match a brute-force relevance scan") {
  const Corpus c = gen_corpus(small_config(600), 11);
  const QueryConfig qc;
  const auto queries = gen_queries(c, 40, 12, qc);
  REQUIRE(queries.size() == 40);
  for (const Query& q : queries) {
    std::vector<PaperId> scan;
    for (const Paper& p : c.papers()) {
      int overlap = 0;
      for (Token t : q.keywords)
        overlap += std::count(p.keywords.begin(), p.keywords.end(), t) > 0;
      if (p.pub_date < q.query_date &&
          overlap >= qc.relevance_threshold * q.keywords.size())
        scan.push_back(p.id);
    }
    CHECK_FALSE(q.answers.empty());
    CHECK_FALSE(q.candidate_searches.empty());
    if (static_cast<int>(scan.size()) <= qc.max_answers) {
      CHECK(q.answers == scan);
    } else {
      CHECK(std::includes(scan.begin(), scan.end(), q.answers.begin(),
                          q.answers.end()));
    }
  }
}

TEST_CASE("gen_queries is deterministic") {
  const Corpus c = gen_corpus(small_config(400), 3);
  CHECK(gen_queries(c, 10, 4) == gen_queries(c, 10, 4));
}

TEST_CASE("corpus and query files round-trip") {
  const Corpus c = gen_corpus(small_config(200), 9);
  std::stringstream ss;
  write_corpus(ss, c);
  const Corpus back = read_corpus(ss);
  CHECK(back == c);

  const auto qs = gen_queries(c, 5, 10);
  std::stringstream qss;
  write_queries(qss, qs);
  CHECK(read_queries(qss) == qs);
}

TEST_CASE("corpus file starts with a format header") {
  const std::string text = serialize(testing::tiny_corpus());
  const auto header = nlohmann::json::parse(text.substr(0, text.find('\n')));
  CHECK(header.at("format") == kCorpusFormat);
  CHECK(header.at("version") == 1);
  CHECK(std::count(text.begin(), text.end(), '\n') == 8);
}

TEST_CASE("reading a corpus without a header is a data error") {
  std::istringstream in("{\"id\":1}\n");
  CHECK_THROWS_AS(read_corpus(in), DataError);
  std::istringstream bad("not json\n");
  CHECK_THROWS_AS(read_corpus(bad), DataError);
}
