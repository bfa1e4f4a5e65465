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

#include "pasa/selector.hpp"

namespace pasa {

void SelectorModel::validate() const {
  if (!(false_positive_rate >= 0.0 && false_positive_rate <= 1.0))
    throw ConfigError("false_positive_rate", "must be in [0, 1]");
  if (!(false_negative_rate >= 0.0 && false_negative_rate <= 1.0))
    throw ConfigError("false_negative_rate", "must be in [0, 1]");
  if (mode == SelectorMode::kExact &&
      (false_positive_rate != 0.0 || false_negative_rate != 0.0))
    throw ConfigError("mode", "exact selector must have zero error rates");
}

Decision select(const SelectorModel& model, const Corpus& corpus,
                const Query& query, PaperId paper) {
  if (!corpus.contains(paper))
    throw LookupError("selector: unknown paper id " + std::to_string(paper));
  const bool truth = query.is_answer(paper);
  if (model.mode == SelectorMode::kExact) return {truth, truth ? 1.0 : 0.0};

  const auto qid = static_cast<std::uint64_t>(query.id);
  const auto pid = static_cast<std::uint64_t>(paper);
  const double flip_u = hash01(derive_seed(model.seed, qid, pid, 1));
  const double score_u = hash01(derive_seed(model.seed, qid, pid, 2));
  const bool accept = truth ? flip_u >= model.false_negative_rate
                            : flip_u < model.false_positive_rate;
  // Score plays the decision-token probability: above 0.5 iff accepted.
  const double score = accept ? 0.5 + 0.5 * score_u : 0.5 * score_u;
  return {accept, score};
}

int indicator(const SelectorModel& model, const Corpus& corpus,
              const Query& query, PaperId paper, const QueueView& before,
              IndicatorMode mode) {
  if (before.contains(paper)) return 0;
  if (query.is_answer(paper)) return 1;
  if (mode == IndicatorMode::kAnswerOnly) return 0;
  return select(model, corpus, query, paper).accept ? 1 : 0;
}

}  // namespace pasa
