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

#ifndef PASA_CORPUS_HPP_
#define PASA_CORPUS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "pasa/common.hpp"

namespace pasa {

struct Section {
  std::string name;
  std::vector<PaperId> cited;

  bool operator==(const Section&) const = default;
};

struct Paper {
  PaperId id = 0;
  std::vector<Token> keywords;  // sorted, unique
  Day pub_date = 0;
  std::vector<Section> sections;

  bool operator==(const Paper&) const = default;
};

struct CorpusConfig {
  int n_papers = 2000;
  int n_topics = 20;
  int keywords_per_topic = 12;
  int min_keywords = 3;
  int max_keywords = 6;
  int max_topics_per_paper = 3;
  int min_sections = 1;
  int max_sections = 5;
  int citation_fanout = 6;  // max citations per section
  Day date_horizon = 3650;
  double same_topic_bias = 0.85;

  // Throws ConfigError naming the first offending field.
  void validate() const;

  bool operator==(const CorpusConfig&) const = default;
};

// Immutable after construction. Papers are stored in ascending id order.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Paper> papers, CorpusConfig config, std::uint64_t seed);

  const std::vector<Paper>& papers() const { return papers_; }
  std::size_t size() const { return papers_.size(); }
  bool contains(PaperId id) const { return index_.count(id) != 0; }
  // Throws LookupError for unknown ids.
  const Paper& paper(PaperId id) const;
  const Paper* find(PaperId id) const;

  const CorpusConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

  bool operator==(const Corpus& o) const {
    return papers_ == o.papers_ && config_ == o.config_ && seed_ == o.seed_;
  }

 private:
  std::vector<Paper> papers_;
  std::unordered_map<PaperId, std::size_t> index_;
  CorpusConfig config_;
  std::uint64_t seed_ = 0;
};

Corpus gen_corpus(const CorpusConfig& config, std::uint64_t seed);

struct Violation {
  std::string kind;  // missing-citation, forward-edge, duplicate-section, ...
  std::vector<PaperId> ids;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool mentions(PaperId id) const;
};

ValidationReport validate_corpus(const Corpus& corpus);

// Kahn topological sort over citation edges; false if a cycle exists or an
// edge points outside the corpus.
bool citation_graph_is_dag(const Corpus& corpus);

// ---------------------------------------------------------------- queries --

struct SearchSpec {
  std::vector<Token> keywords;  // sorted, unique, non-empty
  std::string label;

  bool operator==(const SearchSpec&) const = default;
};

struct Query {
  std::int64_t id = 0;
  std::vector<Token> keywords;  // sorted, unique
  Day query_date = 0;
  std::vector<PaperId> answers;  // sorted
  std::vector<SearchSpec> candidate_searches;

  bool is_answer(PaperId id) const;
  bool operator==(const Query&) const = default;
};

struct QueryConfig {
  int min_keywords = 3;
  int max_keywords = 4;
  int n_candidate_searches = 8;
  double relevance_threshold = 0.5;
  double min_date_fraction = 0.5;  // query dates fall in the later part
  int max_answers = 60;
  int max_retries = 1000;

  void validate() const;
};

// Keyword overlap |a ∩ b| for sorted token lists.
int keyword_overlap(const std::vector<Token>& a, const std::vector<Token>& b);

// Planted relevance: overlap / |query keywords| >= threshold and strictly
// earlier than the query date.
bool is_relevant(const Paper& paper, const std::vector<Token>& query_keywords,
                 Day query_date, double threshold);

std::vector<PaperId> answer_set(const Corpus& corpus,
                                const std::vector<Token>& query_keywords,
                                Day query_date, double threshold);

// Full keyword set, singletons, one superset with a distractor token, then
// pure-distractor specs up to `k` entries.
std::vector<SearchSpec> make_candidate_searches(
    const CorpusConfig& corpus_config, const std::vector<Token>& keywords,
    int k, Rng& rng);

// Builds one query; throws GenerationError when the answer set is empty.
Query make_query(const Corpus& corpus, std::int64_t id,
                 std::vector<Token> keywords, Day query_date,
                 const QueryConfig& config, Rng& rng);

std::vector<Query> gen_queries(const Corpus& corpus, int n,
                               std::uint64_t seed,
                               const QueryConfig& config = {});

// ------------------------------------------------------------------ files --

inline constexpr const char* kCorpusFormat = "pasa-lab-corpus";
inline constexpr const char* kQueriesFormat = "pasa-lab-queries";

void write_corpus(std::ostream& out, const Corpus& corpus);
Corpus read_corpus(std::istream& in);
void write_queries(std::ostream& out, const std::vector<Query>& queries);
std::vector<Query> read_queries(std::istream& in);

void save_corpus(const std::string& path, const Corpus& corpus);
Corpus load_corpus(const std::string& path);
void save_queries(const std::string& path, const std::vector<Query>& queries);
std::vector<Query> load_queries(const std::string& path);

}  // namespace pasa

#endif  // PASA_CORPUS_HPP_
