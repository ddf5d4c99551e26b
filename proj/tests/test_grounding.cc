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

#include <random>

#include "doctest.h"
#include "kgimpute/grounding.h"
#include "tempdir.h"

using namespace kgimpute;
using kgimpute::testing::TempDir;

namespace {

std::string join(const TokenSet& s) {
  std::string out;
  for (const auto& t : s) out += t + " ";
  return out;
}

EmbeddingTable table_with(std::initializer_list<const char*> words) {
  EmbeddingTable t(2);
  for (const char* w : words) t.insert(w, Vector::Ones(2));
  return t;
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("The withdrawal of the United Kingdom") == TokenSet{"the", "withdrawal", "of", "united", "kingdom"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("23 June 2016") == TokenSet{"june"});
  CHECK(tokenize("Operation_Unthinkable (1945)") == TokenSet{"operation", "unthinkable"});
  CHECK(tokenize("UK's EU-exit", {.lowercase = false}) == TokenSet{"UK", "s", "EU", "exit"});
  CHECK(tokenize("covid 19 covid19", {.keep_digits = true}) == TokenSet{"covid", "19", "covid19"});
  CHECK(tokenize("the cat of the hat", {.stopwords = {"the", "of"}}) == TokenSet{"cat", "hat"});
  CHECK(tokenize("caf\xC3\xA9 na\xC3\xAFve") == TokenSet{"caf\xC3\xA9", "na\xC3\xAFve"});
}

TEST_CASE("tokenize is idempotent and ignores the summary/definition split") {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcXYZ019 _-,.'\t";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 60);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (std::size_t i = 0, n = len(rng); i < n; ++i) text += alphabet[pick(rng)];
    const auto once = tokenize(text);
    CHECK(tokenize(join(once)) == once);

    const auto cut = std::uniform_int_distribution<std::size_t>(0, text.size())(rng);
    const auto rec = make_record("w", text.substr(0, cut), text.substr(cut));
    // splitting mid-token may create new tokens, so compare on a token boundary
    const auto a = make_record("w", join(once), "");
    const auto b = make_record("w", "", join(once));
    CHECK(a.tokens == b.tokens);
    CHECK(rec.tokens == tokenize(rec.summary + " " + rec.definition));
  }
}

TEST_CASE("load_grounding_corpus") {
  TempDir dir;
  const auto p = dir.write("c.tsv",
                           "brexit\tBrexit, a portmanteau of \"British\" and \"exit\", is the withdrawal of the United "
                           "Kingdom (UK) from the European Union (EU).\tThe withdrawal of the United Kingdom from the "
                           "European Union.\n"
                           "x\t\t\n");
  const auto corpus = load_grounding_corpus(p);
  REQUIRE(corpus.find("brexit"));
  const auto& tokens = corpus.find("brexit")->tokens;
  for (const char* t : {"brexit", "portmanteau", "withdrawal", "united", "kingdom", "european", "union"})
    CHECK(tokens.count(t) == 1);
  REQUIRE(corpus.find("x"));
  CHECK(corpus.find("x")->tokens.empty());
  CHECK(corpus.duplicates == 0);
}

TEST_CASE("later duplicate corpus records win") {
  TempDir dir;
  const auto corpus = load_grounding_corpus(dir.write("c.tsv", "x\tfirst\t\nx\tsecond\t\n"));
  CHECK(corpus.records.size() == 1);
  CHECK(corpus.find("x")->tokens == TokenSet{"second"});
  CHECK(corpus.duplicates == 1);
}

TEST_CASE("malformed corpus lines report their line number") {
  TempDir dir;
  try {
    load_grounding_corpus(dir.write("c.tsv", "a\tb\tc\nonly\ttwo\n"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(load_grounding_corpus(dir.write("d.tsv", "\tsummary\tdef\n")), ParseError);
  CHECK_THROWS_AS(load_grounding_corpus(dir.write("e.tsv", "a\tb\tc\td\n")), ParseError);
}

TEST_CASE("frequency list ordering") {
  const auto f = FrequencyList::from_counts({{"b", 5}, {"a", 5}, {"c", 9}, {"d", 0}});
  REQUIRE(f.ranked.size() == 4);
  CHECK(f.ranked[0].first == "c");
  CHECK(f.ranked[1].first == "a");
  CHECK(f.ranked[2].first == "b");
  CHECK(f.ranked[3].first == "d");

  TempDir dir;
  const auto loaded = load_frequency_list(dir.write("f.txt", "the 100\nof 90\ncat 10\ndog 9\ncat 5\n"));
  CHECK(loaded.ranked[2] == std::pair<std::string, std::uint64_t>{"cat", 15});
  CHECK_THROWS_AS(load_frequency_list(dir.write("g.txt", "the x\n")), ParseError);
}

TEST_CASE("select_vocabulary") {
  const auto freq = FrequencyList::from_counts({{"the", 100}, {"of", 90}, {"cat", 10}, {"dog", 9}});

  auto sel = select_vocabulary(freq, table_with({"the", "of", "cat", "dog"}), 2, 2);
  CHECK(sel.selected == std::vector<std::string>{"cat", "dog"});
  CHECK(sel.skipped == std::vector<std::string>{"the", "of"});

  sel = select_vocabulary(freq, table_with({"the", "of", "dog"}), 2, 2);
  CHECK(sel.selected == std::vector<std::string>{"dog"});

  sel = select_vocabulary(freq, table_with({"the", "of", "cat", "dog"}), 0, 10);
  CHECK(sel.selected.size() == 4);

  CHECK_THROWS_AS(select_vocabulary(freq, table_with({"the", "of"}), 2, 5), Error);
  CHECK_THROWS_AS(select_vocabulary(freq, table_with({"cat"}), 0, 0), Error);

  // deterministic
  const auto t = table_with({"the", "of", "cat", "dog"});
  CHECK(select_vocabulary(freq, t, 1, 2).selected == select_vocabulary(freq, t, 1, 2).selected);
}

TEST_CASE("word lists join multi-word entries with underscores") {
  TempDir dir;
  const auto words = load_word_list(dir.write("w.txt", "Operation Unthinkable\n# comment\n\nbrexit\n"));
  CHECK(words == std::vector<std::string>{"Operation_Unthinkable", "brexit"});
  CHECK(load_stopwords(dir.write("s.txt", "The\nof\n")) == std::unordered_set<std::string>{"the", "of"});
}
