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

#include "kgimpute/grounding.h"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace kgimpute {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

TokenSet tokenize(std::string_view text, const TokenizerOptions& opts) {
  TokenSet out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    bool all_digits = true;
    while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) {
      if (text[j] < '0' || text[j] > '9') all_digits = false;
      ++j;
    }
    if (j > i && (opts.keep_digits || !all_digits)) {
      std::string tok = opts.lowercase ? to_lower(text.substr(i, j - i))
                                       : std::string(text.substr(i, j - i));
      if (!opts.stopwords.count(tok)) out.insert(std::move(tok));
    }
    i = j;
  }
  return out;
}

const GroundingRecord* GroundingCorpus::find(const std::string& word) const {
  auto it = records.find(word);
  return it == records.end() ? nullptr : &it->second;
}

GroundingRecord make_record(std::string word, std::string summary, std::string definition,
                            const TokenizerOptions& opts) {
  GroundingRecord rec{std::move(word), std::move(summary), std::move(definition), {}};
  rec.tokens = tokenize(rec.summary + " " + rec.definition, opts);
  return rec;
}

GroundingCorpus load_grounding_corpus(const std::filesystem::path& path,
                                      const TokenizerOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open grounding corpus " + path.string());
  GroundingCorpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw ParseError(path.string(), lineno, "expected 3 tab-separated fields");
    std::string word = line.substr(0, t1);
    if (trim(word).empty()) throw ParseError(path.string(), lineno, "record has no word");
    auto rec = make_record(word, line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1), opts);
    auto [it, inserted] = corpus.records.try_emplace(word, std::move(rec));
    if (!inserted) {
      it->second = std::move(rec);
      ++corpus.duplicates;
    }
  }
  return corpus;
}

FrequencyList FrequencyList::from_counts(std::vector<std::pair<std::string, std::uint64_t>> counts) {
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return FrequencyList{std::move(counts)};
}

FrequencyList load_frequency_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open frequency list " + path.string());
  std::unordered_map<std::string, std::uint64_t> counts;
  std::vector<std::string> order;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    const auto sp = sv.find_last_of(" \t");
    if (sp == std::string_view::npos) throw ParseError(path.string(), lineno, "expected 'word count'");
    std::string_view word = trim(sv.substr(0, sp));
    std::string_view num = sv.substr(sp + 1);
    std::uint64_t c = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), c);
    if (word.empty() || ec != std::errc() || ptr != num.data() + num.size())
      throw ParseError(path.string(), lineno, "expected 'word count'");
    auto [it, inserted] = counts.try_emplace(std::string(word), 0);
    if (inserted) order.push_back(it->first);
    it->second += c;
  }
  std::vector<std::pair<std::string, std::uint64_t>> v;
  v.reserve(order.size());
  for (auto& w : order) v.emplace_back(w, counts[w]);
  return FrequencyList::from_counts(std::move(v));
}

VocabSelection select_vocabulary(const FrequencyList& freq, const EmbeddingTable& table,
                                 std::size_t skip_top, std::size_t v_prime_size) {
  if (v_prime_size < 1) throw Error("v_prime_size must be at least 1");
  VocabSelection sel;
  sel.skip_top = skip_top;
  sel.v_prime_size = v_prime_size;
  const std::size_t n_skip = std::min(skip_top, freq.ranked.size());
  for (std::size_t i = 0; i < n_skip; ++i) sel.skipped.push_back(freq.ranked[i].first);
  for (std::size_t i = n_skip; i < freq.ranked.size() && sel.selected.size() < v_prime_size; ++i)
    if (table.contains(freq.ranked[i].first)) sel.selected.push_back(freq.ranked[i].first);
  if (sel.selected.empty())
    throw Error("no eligible vocabulary words after skipping the top " + std::to_string(skip_top));
  return sel;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word list " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string w(trim(line));
    if (w.empty() || w.front() == '#') continue;
    std::replace(w.begin(), w.end(), ' ', '_');
    std::replace(w.begin(), w.end(), '\t', '_');
    out.push_back(std::move(w));
  }
  return out;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path, bool lowercase) {
  std::unordered_set<std::string> out;
  for (auto& w : load_word_list(path)) out.insert(lowercase ? to_lower(w) : w);
  return out;
}

}  // namespace kgimpute
