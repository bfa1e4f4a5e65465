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

#ifndef PASA_SELECTOR_HPP_
#define PASA_SELECTOR_HPP_

#include <cstdint>

#include "pasa/corpus.hpp"
#include "pasa/env.hpp"

namespace pasa {

enum class SelectorMode { kExact, kNoisy };

struct SelectorModel {
  SelectorMode mode = SelectorMode::kExact;
  double false_positive_rate = 0.0;
  double false_negative_rate = 0.0;
  std::uint64_t seed = 0;

  static SelectorModel exact() { return {}; }
  static SelectorModel noisy(double fpr, double fnr, std::uint64_t seed) {
    return {SelectorMode::kNoisy, fpr, fnr, seed};
  }
  void validate() const;
};

struct Decision {
  bool accept = false;
  double score = 0.0;  // in [0, 1]; accept iff score >= 0.5
};

// Noisy labels are a pure function of (seed, query id, paper id).
Decision select(const SelectorModel& model, const Corpus& corpus,
                const Query& query, PaperId paper);

enum class IndicatorMode {
  kSelectorOrAnswer,  // Selector(q, p) = 1 or p in answers
  kAnswerOnly,        // p in answers
};

// 1 iff the paper is judged relevant and was not in the queue before the
// current action.
int indicator(const SelectorModel& model, const Corpus& corpus,
              const Query& query, PaperId paper, const QueueView& before,
              IndicatorMode mode = IndicatorMode::kSelectorOrAnswer);

}  // namespace pasa

#endif  // PASA_SELECTOR_HPP_
