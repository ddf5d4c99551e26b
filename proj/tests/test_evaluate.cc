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

#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/statistics/bivariate_statistics.hpp>

#include "doctest.h"
#include "kgimpute/evaluate.h"
#include "tempdir.h"

using namespace kgimpute;
namespace kt = kgimpute::testing;

namespace {

// Reference: Boost's correlation on O(n^2) counted average ranks.
double reference_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) {
        less += w < v[i];
        equal += w == v[i];
      }
      r[i] = less + (equal + 1) / 2;
    }
    return r;
  };
  return boost::math::statistics::correlation_coefficient(ranks(x), ranks(y));
}

EmbeddingTable table_of(std::initializer_list<std::pair<const char*, std::vector<double>>> entries) {
  EmbeddingTable t(static_cast<int>(entries.begin()->second.size()));
  for (const auto& [w, v] : entries) t.insert(w, Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  return t;
}

}  // namespace

TEST_CASE("load_dataset") {
  kt::TempDir dir;
  const auto ds = load_dataset(dir.write("card.tsv", "# header\na\tb\t1.5\nc\td\t2\ne\tf\t-3e-1\n"));
  CHECK(ds.name == "card");
  REQUIRE(ds.pairs.size() == 3);
  CHECK(ds.pairs[2].gold == -0.3);
  try {
    load_dataset(dir.write("bad.tsv", "a\tb\t1\na\tb\tx\n"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(load_dataset(dir.write("comments.tsv", "# one\n# two\n")), Error);
  CHECK_THROWS_AS(load_dataset(dir.write("short.tsv", "a\tb\n")), ParseError);
}

TEST_CASE("score_pairs") {
  const auto t = table_of({{"x", {1, 2}}, {"y", {3, -1}}});
  SimilarityDataset ds{"d", {{"x", "y", 1.0}, {"x", "missing", 2.0}}};
  const auto s = score_pairs(ds, t);
  CHECK(s.model_scores == std::vector<double>{1.0, 0.0});
  CHECK(s.missed_words_pct == doctest::Approx(100.0 / 3));
  CHECK(s.missed_pairs_pct == 50.0);

  SimilarityDataset covered{"d", {{"x", "y", 1.0}, {"y", "x", 2.0}}};
  const auto c = score_pairs(covered, t);
  CHECK(c.missed_words_pct == 0.0);
  CHECK(c.missed_pairs_pct == 0.0);
}

TEST_CASE("dataset words fall back to lowercase") {
  const auto t = table_of({{"paris", {1, 0}}, {"london", {1, 1}}});
  SimilarityDataset ds{"d", {{"Paris", "london", 1.0}, {"Paris", "Paris", 2.0}}};
  CHECK(score_pairs(ds, t).missed_pairs_pct == 0.0);
  CHECK(score_pairs(ds, t, false).missed_pairs_pct == 100.0);
}

TEST_CASE("score_pairs is order preserving") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  EmbeddingTable t(3);
  for (int i = 0; i < 20; ++i) t.insert("w" + std::to_string(i), Vector::NullaryExpr(3, [&] { return normal(rng); }));
  SimilarityDataset ds{"d", {}};
  std::uniform_int_distribution<int> pick(0, 24);
  for (int i = 0; i < 40; ++i)
    ds.pairs.push_back({"w" + std::to_string(pick(rng)), "w" + std::to_string(pick(rng)), normal(rng)});
  const auto base = score_pairs(ds, t);
  std::vector<std::size_t> perm(ds.pairs.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  SimilarityDataset shuffled{"d", {}};
  for (auto i : perm) shuffled.pairs.push_back(ds.pairs[i]);
  const auto s = score_pairs(shuffled, t);
  for (std::size_t k = 0; k < perm.size(); ++k) CHECK(s.model_scores[k] == base.model_scores[perm[k]]);
  CHECK(s.missed_pairs_pct == base.missed_pairs_pct);
}

TEST_CASE("pearson") {
  CHECK(pearson(std::vector{1.0, 2.0, 3.0}, std::vector{2.0, 4.0, 6.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(std::vector{1.0, 2.0, 3.0}, std::vector{3.0, 2.0, 1.0}) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector x{1.0, 2.0, 3.0, 4.0}, y{1.0, 3.0, 2.0, 4.0};
  CHECK(std::abs(pearson(x, y) - boost::math::statistics::correlation_coefficient(x, y)) < 1e-12);
  CHECK(pearson(x, y) == doctest::Approx(0.8));
  CHECK_THROWS_AS(pearson(std::vector{1.0, 1.0}, std::vector{1.0, 2.0}), Error);
  CHECK_THROWS_AS(pearson(std::vector{1.0}, std::vector{1.0}), Error);
  CHECK_THROWS_AS(pearson(std::vector{1.0, 2.0}, std::vector{1.0, 2.0, 3.0}), Error);
}

TEST_CASE("pearson under affine maps") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(10 + trial), pos, neg;
    for (auto& v : x) v = normal(rng);
    const double a = std::exp(normal(rng)), b = normal(rng);
    for (double v : x) {
      pos.push_back(a * v + b);
      neg.push_back(-a * v + b);
    }
    CHECK(std::abs(pearson(x, pos) - 1.0) < 1e-12);
    CHECK(std::abs(pearson(x, neg) + 1.0) < 1e-12);
  }
}

TEST_CASE("spearman") {
  CHECK(spearman(std::vector{1.0, 2.0, 3.0}, std::vector{3.0, 1.0, 2.0}) == doctest::Approx(-0.5).epsilon(1e-15));
  const std::vector x{1.0, 1.0, 2.0}, y{1.0, 2.0, 3.0};
  CHECK(std::abs(spearman(x, y) - reference_spearman(x, y)) < 1e-12);
  CHECK(average_ranks(std::vector{5.0, 1.0, 5.0, 3.0}) == std::vector{3.5, 1.0, 3.5, 2.0});
  CHECK_THROWS_AS(spearman(std::vector{2.0, 2.0, 2.0}, std::vector{1.0, 2.0, 3.0}), Error);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(5 + trial % 40), b(a.size());
    for (auto& v : a) v = normal(rng);
    for (auto& v : b) v = normal(rng);
    std::vector<double> a_mono, b_mono;
    for (double v : a) a_mono.push_back(std::exp(3 * v) - 2);
    for (double v : b) b_mono.push_back(v * v * v);
    CHECK(spearman(a, a_mono) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(spearman(a_mono, b_mono) - spearman(a, b)) < 1e-12);
  }
}

TEST_CASE("evaluate includes missed pairs at similarity zero") {
  const auto t = table_of({{"a", {1, 0}}, {"b", {2, 0}}, {"c", {0, 1}}, {"d", {1, 1}}});
  SimilarityDataset ds{"six",
                       {{"a", "b", 4}, {"a", "c", 1}, {"b", "d", 3}, {"c", "d", 2}, {"a", "zz", 0.5}, {"yy", "d", 5}}};
  const auto r = evaluate(ds, t);
  CHECK(r.n_pairs == 6);
  CHECK(r.missed_pairs_pct == doctest::Approx(100.0 / 3));
  // model scores: 2, 0, 2, 1, 0, 0
  const std::vector<double> scores{2, 0, 2, 1, 0, 0}, gold{4, 1, 3, 2, 0.5, 5};
  CHECK(std::abs(r.pearson_r - boost::math::statistics::correlation_coefficient(scores, gold)) < 1e-12);
  CHECK(std::abs(r.spearman_rho - reference_spearman(scores, gold)) < 1e-12);

  kt::TempDir dir;
  write_eval_results(std::vector{r}, dir / "results.json");
  const auto text = kt::read_file(dir / "results.json");
  CHECK(text.find("\"six\"") != std::string::npos);
  CHECK(text.find("\"missed_pairs_pct\"") != std::string::npos);
}

TEST_CASE("constant model scores give NaN correlations") {
  const auto t = table_of({{"a", {1, 0}}});
  SimilarityDataset ds{"d", {{"a", "x", 1}, {"y", "a", 2}}};
  const auto r = evaluate(ds, t);
  CHECK(std::isnan(r.pearson_r));
  CHECK(r.missed_pairs_pct == 100.0);
}
