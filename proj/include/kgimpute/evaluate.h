// Copyright 2026 The kgimpute Authors.
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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kgimpute/embeddings.h"

namespace kgimpute {

struct WordPair {
  std::string first;
  std::string second;
  double gold;
};

struct SimilarityDataset {
  std::string name;
  std::vector<WordPair> pairs;
};

/// `word1<TAB>word2<TAB>score` lines; `#` comment lines skipped. Needs >= 2 pairs.
SimilarityDataset load_dataset(const std::filesystem::path& path);

struct PairScores {
  std::vector<double> model_scores;
  double missed_words_pct = 0.0;
  double missed_pairs_pct = 0.0;
};

/// Inner-product similarity with missing words treated as zero vectors.
/// With `lowercase_fallback`, a word not found verbatim is retried lowercased.
PairScores score_pairs(const SimilarityDataset& ds, const EmbeddingTable& vectors,
                       bool lowercase_fallback = true);

/// Sample Pearson correlation. Throws on length mismatch, fewer than two
/// values or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties receiving the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct EvalResult {
  std::string dataset;
  /// NaN when the model scores are constant (e.g. every pair missed).
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  double missed_words_pct = 0.0;
  double missed_pairs_pct = 0.0;
  std::size_t n_pairs = 0;
};

EvalResult evaluate(const SimilarityDataset& ds, const EmbeddingTable& vectors,
                    bool lowercase_fallback = true);

/// `{"<dataset>": {pearson, spearman, missed_words_pct, missed_pairs_pct, n_pairs}, ...}`
void write_eval_results(std::span<const EvalResult> results, const std::filesystem::path& path);

}  // namespace kgimpute
