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

#ifndef PASA_RUN_CONFIG_HPP_
#define PASA_RUN_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pasa/corpus.hpp"
#include "pasa/harness.hpp"

namespace pasa {

// Flat-section key-value file:
//
//   [paths]
//   corpus = data/corpus.jsonl
//   [reward]
//   alpha = 1.5
//
// Relative paths resolve against the config file's directory. Every seed is
// required; there is no clock-based fallback.
struct RunConfig {
  std::string base_dir;

  // [paths]
  std::string corpus_path;
  std::string train_queries_path;
  std::string eval_queries_path;
  std::string sft_checkpoint_path;
  std::string checkpoint_path;
  std::string output_dir;

  // [seeds]
  std::uint64_t corpus_seed = 0;
  std::uint64_t query_seed = 0;
  std::uint64_t train_seed = 0;
  std::uint64_t eval_seed = 0;

  CorpusConfig corpus;
  QueryConfig queries;
  int n_train_queries = 200;
  int n_eval_queries = 50;

  SelectorModel selector;
  RewardConfig reward;
  PPOConfig ppo;
  EnvLimits limits;
  ModelConfig model;
  BCConfig bc;
  EvalOptions eval;
  int ensemble_runs = 2;
  int checkpoint_every = 50;
  std::vector<std::string> ablate_variants;
  std::vector<double> alphas = {0.5, 1.0, 1.5, 2.0};
  std::vector<double> costs = {0.0, 0.05, 0.1, 0.2};

  // Throws ConfigError on any invalid field.
  void validate() const;

  // Resolves `p` against base_dir unless absolute.
  std::string resolve(const std::string& p) const;
};

// Key/value pairs as "section.key" -> raw string.
using ConfigOverrides = std::map<std::string, std::string>;

RunConfig parse_run_config(const std::string& text,
                           const std::string& base_dir,
                           const ConfigOverrides& overrides = {});
// DataError when the file cannot be read.
RunConfig load_run_config(const std::string& path,
                          const ConfigOverrides& overrides = {});

// DataError naming the field when the file does not exist.
void require_file(const std::string& path, const std::string& field);

}  // namespace pasa

#endif  // PASA_RUN_CONFIG_HPP_
