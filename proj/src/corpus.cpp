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

#include "pasa/corpus.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <unordered_set>

#include "json.hpp"

namespace pasa {

namespace {

constexpr std::array<const char*, 8> kSectionNames = {
    "introduction", "background", "related-work", "method",
    "experiments",  "analysis",   "discussion",   "appendix"};

void sort_unique(std::vector<Token>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

void CorpusConfig::validate() const {
  if (n_papers < 1) throw ConfigError("n_papers", "must be >= 1");
  if (n_topics < 1) throw ConfigError("n_topics", "must be >= 1");
  if (keywords_per_topic < 1)
    throw ConfigError("keywords_per_topic", "must be >= 1");
  if (min_keywords < 1) throw ConfigError("min_keywords", "must be >= 1");
  if (max_keywords < min_keywords)
    throw ConfigError("max_keywords", "must be >= min_keywords");
  if (max_topics_per_paper < 1)
    throw ConfigError("max_topics_per_paper", "must be >= 1");
  if (max_sections < 1) throw ConfigError("max_sections", "must be >= 1");
  if (min_sections < 1 || min_sections > max_sections)
    throw ConfigError("min_sections", "must be in [1, max_sections]");
  if (citation_fanout < 0)
    throw ConfigError("citation_fanout", "must be >= 0");
  if (date_horizon < 1) throw ConfigError("date_horizon", "must be >= 1");
  if (!(same_topic_bias >= 0.0 && same_topic_bias <= 1.0))
    throw ConfigError("same_topic_bias", "must be in [0, 1]");
}

Corpus::Corpus(std::vector<Paper> papers, CorpusConfig config,
               std::uint64_t seed)
    : papers_(std::move(papers)), config_(config), seed_(seed) {
  std::sort(papers_.begin(), papers_.end(),
            [](const Paper& a, const Paper& b) { return a.id < b.id; });
  index_.reserve(papers_.size());
  for (std::size_t i = 0; i < papers_.size(); ++i)
    index_.emplace(papers_[i].id, i);
}

const Paper& Corpus::paper(PaperId id) const {
  const Paper* p = find(id);
  if (p == nullptr) throw LookupError("unknown paper id " + std::to_string(id));
  return *p;
}

const Paper* Corpus::find(PaperId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &papers_[it->second];
}

Corpus gen_corpus(const CorpusConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, 0xC0));
  const int n = config.n_papers;
  const int kpt = config.keywords_per_topic;

  std::vector<Day> dates(n);
  for (auto& d : dates) d = uniform_int(rng, 0, config.date_horizon - 1);
  std::sort(dates.begin(), dates.end());

  std::vector<Paper> papers(n);
  std::vector<std::vector<int>> paper_topics(n);
  std::vector<std::vector<int>> topic_papers(config.n_topics);

  for (int i = 0; i < n; ++i) {
    Paper& p = papers[i];
    p.id = i;
    p.pub_date = dates[i];

    const int n_top = static_cast<int>(uniform_int(
        rng, 1, std::min(config.max_topics_per_paper, config.n_topics)));
    auto& topics = paper_topics[i];
    while (static_cast<int>(topics.size()) < n_top) {
      const int t = static_cast<int>(uniform_index(rng, config.n_topics));
      if (std::find(topics.begin(), topics.end(), t) == topics.end())
        topics.push_back(t);
    }
    for (int t : topics) topic_papers[t].push_back(i);

    // Keywords concentrate on the first (primary) topic.
    const int pool = n_top * kpt;
    const int want = std::min<int>(
        pool, static_cast<int>(uniform_int(rng, config.min_keywords,
                                           config.max_keywords)));
    std::set<Token> kw;
    while (static_cast<int>(kw.size()) < want) {
      const int t = uniform01(rng) < 0.7
                        ? topics.front()
                        : topics[uniform_index(rng, topics.size())];
      kw.insert(static_cast<Token>(t * kpt + uniform_index(rng, kpt)));
    }
    p.keywords.assign(kw.begin(), kw.end());
  }

  for (int i = 0; i < n; ++i) {
    Paper& p = papers[i];
    const int n_sec = static_cast<int>(
        uniform_int(rng, config.min_sections, config.max_sections));
    std::vector<std::string> names;
    if (n_sec <= static_cast<int>(kSectionNames.size())) {
      std::vector<int> idx(kSectionNames.size());
      std::iota(idx.begin(), idx.end(), 0);
      for (int k = static_cast<int>(idx.size()) - 1; k > 0; --k)
        std::swap(idx[k], idx[uniform_index(rng, k + 1)]);
      idx.resize(n_sec);
      std::sort(idx.begin(), idx.end());
      for (int k : idx) names.emplace_back(kSectionNames[k]);
    } else {
      for (int k = 0; k < n_sec; ++k)
        names.push_back("section-" + std::to_string(k + 1));
    }

    // Papers strictly earlier than p form the citable prefix.
    const int earlier = static_cast<int>(
        std::lower_bound(dates.begin(), dates.end(), p.pub_date) -
        dates.begin());

    // Same-topic candidates weighted by (1 + keyword overlap)^2 so papers
    // with shared keywords cite each other.
    std::vector<int> cand;
    for (int t : paper_topics[i]) {
      for (int j : topic_papers[t]) {
        if (j >= earlier) break;
        cand.push_back(j);
      }
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::vector<double> cum(cand.size());
    double acc = 0.0;
    for (std::size_t c = 0; c < cand.size(); ++c) {
      const double ov = keyword_overlap(p.keywords, papers[cand[c]].keywords);
      acc += (1.0 + ov) * (1.0 + ov);
      cum[c] = acc;
    }

    for (int s = 0; s < n_sec; ++s) {
      Section sec;
      sec.name = names[s];
      if (earlier > 0) {
        const int m = static_cast<int>(uniform_int(
            rng, 0, std::min(config.citation_fanout, earlier)));
        std::unordered_set<PaperId> seen;
        for (int attempt = 0;
             static_cast<int>(sec.cited.size()) < m && attempt < 8 * m + 8;
             ++attempt) {
          int j;
          if (!cand.empty() && uniform01(rng) < config.same_topic_bias) {
            const double u = uniform01(rng) * acc;
            auto it = std::upper_bound(cum.begin(), cum.end(), u);
            if (it == cum.end()) --it;
            j = cand[it - cum.begin()];
          } else {
            j = static_cast<int>(uniform_index(rng, earlier));
          }
          if (seen.insert(j).second) sec.cited.push_back(j);
        }
      }
      p.sections.push_back(std::move(sec));
    }
  }

  // Ids carry no date information: search ties (broken by id) then land
  // anywhere in time rather than on the oldest papers.
  Rng id_rng(derive_seed(seed, 0xC1));
  std::vector<PaperId> new_id(n);
  std::iota(new_id.begin(), new_id.end(), PaperId{0});
  for (int k = n - 1; k > 0; --k)
    std::swap(new_id[k], new_id[uniform_index(id_rng, k + 1)]);
  for (Paper& p : papers) {
    p.id = new_id[p.id];
    for (Section& sec : p.sections)
      for (PaperId& c : sec.cited) c = new_id[c];
  }
  return Corpus(std::move(papers), config, seed);
}

bool ValidationReport::mentions(PaperId id) const {
  for (const auto& v : violations)
    if (std::find(v.ids.begin(), v.ids.end(), id) != v.ids.end()) return true;
  return false;
}

ValidationReport validate_corpus(const Corpus& corpus) {
  ValidationReport report;
  auto add = [&](std::string kind, std::vector<PaperId> ids, std::string msg) {
    report.violations.push_back({std::move(kind), std::move(ids), std::move(msg)});
  };

  std::unordered_set<PaperId> ids;
  for (const Paper& p : corpus.papers()) {
    if (!ids.insert(p.id).second)
      add("duplicate-id", {p.id}, "paper id " + std::to_string(p.id) +
                                      " appears more than once");
  }
  for (const Paper& p : corpus.papers()) {
    std::set<std::string> names;
    for (const Section& s : p.sections) {
      if (!names.insert(s.name).second)
        add("duplicate-section", {p.id},
            "paper " + std::to_string(p.id) + " repeats section '" + s.name +
                "'");
      std::unordered_set<PaperId> cited;
      for (PaperId c : s.cited) {
        if (!cited.insert(c).second)
          add("duplicate-citation", {p.id, c},
              "paper " + std::to_string(p.id) + " section '" + s.name +
                  "' cites " + std::to_string(c) + " twice");
        const Paper* target = corpus.find(c);
        if (target == nullptr) {
          add("missing-citation", {p.id, c},
              "paper " + std::to_string(p.id) + " cites missing id " +
                  std::to_string(c));
        } else if (target->pub_date >= p.pub_date) {
          add("forward-edge", {p.id, c},
              "edge " + std::to_string(p.id) + " -> " + std::to_string(c) +
                  " is not backward in time (" +
                  std::to_string(p.pub_date) + " <= " +
                  std::to_string(target->pub_date) + ")");
        }
      }
    }
  }
  if (!citation_graph_is_dag(corpus)) {
    bool explained = false;
    for (const auto& v : report.violations)
      explained |= v.kind == "forward-edge" || v.kind == "missing-citation";
    if (!explained) add("cycle", {}, "citation graph contains a cycle");
  }
  return report;
}

bool citation_graph_is_dag(const Corpus& corpus) {
  const auto& papers = corpus.papers();
  std::unordered_map<PaperId, std::size_t> pos;
  for (std::size_t i = 0; i < papers.size(); ++i) pos[papers[i].id] = i;
  std::vector<int> indeg(papers.size(), 0);
  std::vector<std::vector<std::size_t>> out(papers.size());
  for (std::size_t i = 0; i < papers.size(); ++i) {
    for (const Section& s : papers[i].sections) {
      for (PaperId c : s.cited) {
        auto it = pos.find(c);
        if (it == pos.end()) return false;
        out[i].push_back(it->second);
        ++indeg[it->second];
      }
    }
  }
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < papers.size(); ++i)
    if (indeg[i] == 0) ready.push_back(i);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t u = ready.front();
    ready.pop_front();
    ++visited;
    for (std::size_t v : out[u])
      if (--indeg[v] == 0) ready.push_back(v);
  }
  return visited == papers.size();
}

// ---------------------------------------------------------------- queries --

bool Query::is_answer(PaperId id) const {
  return std::binary_search(answers.begin(), answers.end(), id);
}

void QueryConfig::validate() const {
  if (min_keywords < 1) throw ConfigError("min_keywords", "must be >= 1");
  if (max_keywords < min_keywords)
    throw ConfigError("max_keywords", "must be >= min_keywords");
  if (n_candidate_searches < 1)
    throw ConfigError("n_candidate_searches", "must be >= 1");
  if (!(relevance_threshold > 0.0 && relevance_threshold <= 1.0))
    throw ConfigError("relevance_threshold", "must be in (0, 1]");
  if (!(min_date_fraction >= 0.0 && min_date_fraction <= 1.0))
    throw ConfigError("min_date_fraction", "must be in [0, 1]");
  if (max_answers < 1) throw ConfigError("max_answers", "must be >= 1");
  if (max_retries < 1) throw ConfigError("max_retries", "must be >= 1");
}

int keyword_overlap(const std::vector<Token>& a, const std::vector<Token>& b) {
  int n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

bool is_relevant(const Paper& paper, const std::vector<Token>& query_keywords,
                 Day query_date, double threshold) {
  if (query_keywords.empty() || paper.pub_date >= query_date) return false;
  const double frac = static_cast<double>(keyword_overlap(paper.keywords,
                                                          query_keywords)) /
                      static_cast<double>(query_keywords.size());
  return frac >= threshold;
}

std::vector<PaperId> answer_set(const Corpus& corpus,
                                const std::vector<Token>& query_keywords,
                                Day query_date, double threshold) {
  std::vector<PaperId> out;
  for (const Paper& p : corpus.papers())
    if (is_relevant(p, query_keywords, query_date, threshold))
      out.push_back(p.id);
  return out;
}

std::vector<SearchSpec> make_candidate_searches(
    const CorpusConfig& cc, const std::vector<Token>& keywords, int k,
    Rng& rng) {
  const int vocab = cc.n_topics * cc.keywords_per_topic;
  std::set<int> query_topics;
  for (Token t : keywords) query_topics.insert(t / cc.keywords_per_topic);

  // Distractor tokens come from topics the query does not touch when
  // possible, otherwise from any token outside the query.
  std::vector<Token> pool;
  for (Token t = 0; t < vocab; ++t)
    if (!query_topics.count(t / cc.keywords_per_topic)) pool.push_back(t);
  if (pool.empty()) {
    for (Token t = 0; t < vocab; ++t)
      if (!std::binary_search(keywords.begin(), keywords.end(), t))
        pool.push_back(t);
  }
  auto draw = [&]() { return pool[uniform_index(rng, pool.size())]; };

  std::vector<SearchSpec> specs;
  specs.push_back({keywords, "full"});
  for (Token t : keywords) specs.push_back({{t}, "single:" + std::to_string(t)});
  if (!pool.empty()) {
    SearchSpec sup{keywords, "superset"};
    sup.keywords.push_back(draw());
    sort_unique(sup.keywords);
    specs.push_back(std::move(sup));
    for (int d = 0; static_cast<int>(specs.size()) < k; ++d) {
      SearchSpec dis{{draw(), draw()}, "distractor:" + std::to_string(d)};
      sort_unique(dis.keywords);
      specs.push_back(std::move(dis));
    }
  }
  if (static_cast<int>(specs.size()) > k) specs.resize(k);
  return specs;
}

Query make_query(const Corpus& corpus, std::int64_t id,
                 std::vector<Token> keywords, Day query_date,
                 const QueryConfig& config, Rng& rng) {
  sort_unique(keywords);
  if (keywords.empty()) throw GenerationError("query has no keywords", 0);
  Query q;
  q.id = id;
  q.keywords = std::move(keywords);
  q.query_date = query_date;
  q.answers = answer_set(corpus, q.keywords, query_date,
                         config.relevance_threshold);
  if (q.answers.empty())
    throw GenerationError("query " + std::to_string(id) +
                              " has an empty answer set",
                          0);
  q.candidate_searches = make_candidate_searches(
      corpus.config(), q.keywords, config.n_candidate_searches, rng);
  return q;
}

std::vector<Query> gen_queries(const Corpus& corpus, int n,
                               std::uint64_t seed, const QueryConfig& config) {
  if (n < 1) throw UsageError("gen_queries: n must be >= 1");
  config.validate();
  if (corpus.size() == 0)
    throw GenerationError("corpus is empty; no answer set possible", 0);
  const CorpusConfig& cc = corpus.config();
  const int kpt = cc.keywords_per_topic;
  Rng rng(derive_seed(seed, 0xA5));

  const auto& papers = corpus.papers();
  Day max_date = 0;
  for (const Paper& p : papers) max_date = std::max(max_date, p.pub_date);
  const Day horizon = std::max<Day>(cc.date_horizon, max_date + 1);
  const Day lo = static_cast<Day>(config.min_date_fraction *
                                  static_cast<double>(horizon));

  std::vector<Query> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < config.max_retries && !done; ++attempt) {
      const Day date = uniform_int(rng, lo, horizon);
      const Paper& anchor = papers[uniform_index(rng, papers.size())];
      if (anchor.pub_date >= date || anchor.keywords.empty()) continue;

      // Focus the query on one topic of the anchor paper.
      const int topic =
          anchor.keywords[uniform_index(rng, anchor.keywords.size())] / kpt;
      std::vector<Token> in_topic;
      for (Token t : anchor.keywords)
        if (t / kpt == topic) in_topic.push_back(t);
      const int want = static_cast<int>(
          std::min<std::int64_t>(uniform_int(rng, config.min_keywords,
                                             config.max_keywords),
                                 kpt));
      for (int k = static_cast<int>(in_topic.size()) - 1; k > 0; --k)
        std::swap(in_topic[k], in_topic[uniform_index(rng, k + 1)]);
      if (static_cast<int>(in_topic.size()) > want) in_topic.resize(want);
      std::set<Token> kw(in_topic.begin(), in_topic.end());
      while (static_cast<int>(kw.size()) < want)
        kw.insert(static_cast<Token>(topic * kpt + uniform_index(rng, kpt)));

      std::vector<Token> keywords(kw.begin(), kw.end());
      const auto answers =
          answer_set(corpus, keywords, date, config.relevance_threshold);
      if (answers.empty() ||
          static_cast<int>(answers.size()) > config.max_answers)
        continue;
      out.push_back(make_query(corpus, i, std::move(keywords), date, config,
                               rng));
      done = true;
    }
    if (!done)
      throw GenerationError("could not generate query " + std::to_string(i) +
                                " with a non-empty answer set",
                            config.max_retries);
  }
  return out;
}

// ------------------------------------------------------------------ files --

namespace {

using ojson = nlohmann::ordered_json;

ojson config_to_json(const CorpusConfig& c) {
  return ojson{{"n_papers", c.n_papers},
               {"n_topics", c.n_topics},
               {"keywords_per_topic", c.keywords_per_topic},
               {"min_keywords", c.min_keywords},
               {"max_keywords", c.max_keywords},
               {"max_topics_per_paper", c.max_topics_per_paper},
               {"min_sections", c.min_sections},
               {"max_sections", c.max_sections},
               {"citation_fanout", c.citation_fanout},
               {"date_horizon", c.date_horizon},
               {"same_topic_bias", c.same_topic_bias}};
}

CorpusConfig config_from_json(const ojson& j) {
  CorpusConfig c;
  c.n_papers = j.value("n_papers", c.n_papers);
  c.n_topics = j.value("n_topics", c.n_topics);
  c.keywords_per_topic = j.value("keywords_per_topic", c.keywords_per_topic);
  c.min_keywords = j.value("min_keywords", c.min_keywords);
  c.max_keywords = j.value("max_keywords", c.max_keywords);
  c.max_topics_per_paper =
      j.value("max_topics_per_paper", c.max_topics_per_paper);
  c.min_sections = j.value("min_sections", c.min_sections);
  c.max_sections = j.value("max_sections", c.max_sections);
  c.citation_fanout = j.value("citation_fanout", c.citation_fanout);
  c.date_horizon = j.value("date_horizon", c.date_horizon);
  c.same_topic_bias = j.value("same_topic_bias", c.same_topic_bias);
  return c;
}

ojson parse_line(const std::string& line, std::size_t lineno) {
  try {
    return ojson::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("line " + std::to_string(lineno) + ": " + e.what());
  }
}

void check_header(std::istream& in, const char* format) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("missing header line");
  const ojson h = parse_line(line, 1);
  if (!h.is_object() || h.value("format", std::string()) != format)
    throw DataError(std::string("header is not a ") + format + " file");
  if (h.value("version", 0) != 1)
    throw DataError("unsupported " + std::string(format) + " version");
}

template <typename F>
void for_each_record(std::istream& in, std::size_t first_line, F&& f) {
  std::string line;
  std::size_t lineno = first_line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      f(parse_line(line, lineno));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

}  // namespace

void write_corpus(std::ostream& out, const Corpus& corpus) {
  ojson header{{"format", kCorpusFormat},
               {"version", 1},
               {"seed", corpus.seed()},
               {"config", config_to_json(corpus.config())}};
  out << header.dump() << '\n';
  for (const Paper& p : corpus.papers()) {
    ojson secs = ojson::array();
    for (const Section& s : p.sections)
      secs.push_back(ojson{{"name", s.name}, {"cited", s.cited}});
    ojson rec{{"id", p.id},
              {"keywords", p.keywords},
              {"pub_date", p.pub_date},
              {"sections", std::move(secs)}};
    out << rec.dump() << '\n';
  }
}

Corpus read_corpus(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("missing header line");
  const ojson h = parse_line(line, 1);
  if (!h.is_object() || h.value("format", std::string()) != kCorpusFormat)
    throw DataError("header is not a pasa-lab-corpus file");
  if (h.value("version", 0) != 1)
    throw DataError("unsupported pasa-lab-corpus version");
  const std::uint64_t seed = h.value("seed", std::uint64_t{0});
  const CorpusConfig config =
      h.contains("config") ? config_from_json(h["config"]) : CorpusConfig{};

  std::vector<Paper> papers;
  for_each_record(in, 1, [&](const ojson& r) {
    Paper p;
    p.id = r.at("id").get<PaperId>();
    p.keywords = r.at("keywords").get<std::vector<Token>>();
    p.pub_date = r.at("pub_date").get<Day>();
    for (const auto& s : r.at("sections"))
      p.sections.push_back({s.at("name").get<std::string>(),
                            s.at("cited").get<std::vector<PaperId>>()});
    papers.push_back(std::move(p));
  });
  return Corpus(std::move(papers), config, seed);
}

void write_queries(std::ostream& out, const std::vector<Query>& queries) {
  out << ojson{{"format", kQueriesFormat}, {"version", 1}}.dump() << '\n';
  for (const Query& q : queries) {
    ojson specs = ojson::array();
    for (const SearchSpec& s : q.candidate_searches)
      specs.push_back(ojson{{"keywords", s.keywords}, {"label", s.label}});
    ojson rec{{"id", q.id},
              {"keywords", q.keywords},
              {"query_date", q.query_date},
              {"answers", q.answers},
              {"candidate_searches", std::move(specs)}};
    out << rec.dump() << '\n';
  }
}

std::vector<Query> read_queries(std::istream& in) {
  check_header(in, kQueriesFormat);
  std::vector<Query> out;
  for_each_record(in, 1, [&](const ojson& r) {
    Query q;
    q.id = r.at("id").get<std::int64_t>();
    q.keywords = r.at("keywords").get<std::vector<Token>>();
    q.query_date = r.at("query_date").get<Day>();
    q.answers = r.at("answers").get<std::vector<PaperId>>();
    std::sort(q.answers.begin(), q.answers.end());
    for (const auto& s : r.at("candidate_searches"))
      q.candidate_searches.push_back(
          {s.at("keywords").get<std::vector<Token>>(),
           s.at("label").get<std::string>()});
    if (q.answers.empty())
      throw DataError("query " + std::to_string(q.id) + " has no answers");
    if (q.candidate_searches.empty())
      throw DataError("query " + std::to_string(q.id) +
                      " has no candidate searches");
    out.push_back(std::move(q));
  });
  return out;
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  auto out = open_out(path);
  write_corpus(out, corpus);
}

Corpus load_corpus(const std::string& path) {
  auto in = open_in(path);
  return read_corpus(in);
}

void save_queries(const std::string& path, const std::vector<Query>& queries) {
  auto out = open_out(path);
  write_queries(out, queries);
}

std::vector<Query> load_queries(const std::string& path) {
  auto in = open_in(path);
  return read_queries(in);
}

}  // namespace pasa
