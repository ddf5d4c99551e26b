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

#include "kgimpute/evaluate.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "json.hpp"
#include "kgimpute/grounding.h"

namespace kgimpute {

SimilarityDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path.string());
  SimilarityDataset ds;
  ds.name = path.stem().string();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError(path.string(), lineno, "expected word1<TAB>word2<TAB>score");
    std::string score = line.substr(t2 + 1);
    if (auto t3 = score.find('\t'); t3 != std::string::npos) score.resize(t3);
    double gold = 0.0;
    auto [ptr, ec] = std::from_chars(score.data(), score.data() + score.size(), gold);
    if (score.empty() || ec != std::errc() || ptr != score.data() + score.size() || !std::isfinite(gold))
      throw ParseError(path.string(), lineno, "non-numeric score '" + score + "'");
    ds.pairs.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), gold});
  }
  if (ds.pairs.size() < 2) throw Error(path.string() + ": dataset needs at least 2 pairs");
  return ds;
}

PairScores score_pairs(const SimilarityDataset& ds, const EmbeddingTable& vectors, bool lowercase_fallback) {
  auto find = [&](const std::string& w) {
    auto v = vectors.lookup(w);
    if (!v && lowercase_fallback) return vectors.lookup(to_lower(w));
    return v;
  };
  PairScores out;
  std::unordered_set<std::string> words, missing;
  std::size_t missed_pairs = 0;
  for (const auto& p : ds.pairs) {
    const auto a = find(p.first);
    const auto b = find(p.second);
    words.insert(p.first);
    words.insert(p.second);
    if (!a) missing.insert(p.first);
    if (!b) missing.insert(p.second);
    if (!a || !b) ++missed_pairs;
    out.model_scores.push_back(a && b ? a->dot(*b) : 0.0);
  }
  if (!ds.pairs.empty()) {
    out.missed_words_pct = 100.0 * static_cast<double>(missing.size()) / static_cast<double>(words.size());
    out.missed_pairs_pct = 100.0 * static_cast<double>(missed_pairs) / static_cast<double>(ds.pairs.size());
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("pearson: length mismatch");
  if (x.size() < 2) throw Error("pearson: need at least 2 values");
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Map<const Vector> xv(x.data(), n), yv(y.data(), n);
  const Vector xc = xv.array() - xv.mean();
  const Vector yc = yv.array() - yv.mean();
  const double sxx = xc.squaredNorm();
  const double syy = yc.squaredNorm();
  if (sxx == 0.0 || syy == 0.0) throw Error("correlation undefined for zero-variance input");
  return std::clamp(xc.dot(yc) / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("spearman: length mismatch");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

EvalResult evaluate(const SimilarityDataset& ds, const EmbeddingTable& vectors, bool lowercase_fallback) {
  const auto scores = score_pairs(ds, vectors, lowercase_fallback);
  std::vector<double> gold;
  gold.reserve(ds.pairs.size());
  for (const auto& p : ds.pairs) gold.push_back(p.gold);
  EvalResult r;
  r.dataset = ds.name;
  try {
    r.pearson_r = pearson(scores.model_scores, gold);
    r.spearman_rho = spearman(scores.model_scores, gold);
  } catch (const Error&) {
    // constant scores, e.g. every pair missed
    r.pearson_r = r.spearman_rho = std::numeric_limits<double>::quiet_NaN();
  }
  r.missed_words_pct = scores.missed_words_pct;
  r.missed_pairs_pct = scores.missed_pairs_pct;
  r.n_pairs = ds.pairs.size();
  return r;
}

void write_eval_results(std::span<const EvalResult> results, const std::filesystem::path& path) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& r : results) {
    j[r.dataset] = {{"pearson", r.pearson_r},
                    {"spearman", r.spearman_rho},
                    {"missed_words_pct", r.missed_words_pct},
                    {"missed_pairs_pct", r.missed_pairs_pct},
                    {"n_pairs", r.n_pairs}};
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write results " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace kgimpute
