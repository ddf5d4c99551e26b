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

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgimpute/embeddings.h"

namespace kgimpute {

/// Ordered so that downstream token numbering is deterministic.
using TokenSet = std::set<std::string>;

struct TokenizerOptions {
  bool lowercase = true;
  bool keep_digits = false;
  std::unordered_set<std::string> stopwords;
};

/// Splits on maximal runs of non-alphanumeric ASCII characters. Bytes >= 0x80
/// count as word characters so UTF-8 words stay whole. Lowercasing is ASCII only.
/// Empty tokens, digit-only tokens (unless kept) and stopwords are dropped.
TokenSet tokenize(std::string_view text, const TokenizerOptions& opts = {});

/// ASCII lowercase.
std::string to_lower(std::string_view s);

/// A node word with its grounding text; `tokens` is D_v.
struct GroundingRecord {
  std::string word;
  std::string summary;
  std::string definition;
  TokenSet tokens;
};

struct GroundingCorpus {
  std::unordered_map<std::string, GroundingRecord> records;
  std::size_t duplicates = 0;  // earlier records overwritten by later ones

  const GroundingRecord* find(const std::string& word) const;
};

GroundingRecord make_record(std::string word, std::string summary, std::string definition,
                            const TokenizerOptions& opts = {});

/// Reads `word<TAB>summary<TAB>definition` lines.
GroundingCorpus load_grounding_corpus(const std::filesystem::path& path,
                                      const TokenizerOptions& opts = {});

struct FrequencyList {
  /// Descending by count, ties in lexicographic order.
  std::vector<std::pair<std::string, std::uint64_t>> ranked;

  static FrequencyList from_counts(std::vector<std::pair<std::string, std::uint64_t>> counts);
};

/// Reads `word count` lines. Repeated words have their counts summed.
FrequencyList load_frequency_list(const std::filesystem::path& path);

/// V': the frequent, in-dictionary words that anchor the graph.
struct VocabSelection {
  std::vector<std::string> skipped;
  std::vector<std::string> selected;
  std::size_t skip_top = 0;
  std::size_t v_prime_size = 0;
};

VocabSelection select_vocabulary(const FrequencyList& freq, const EmbeddingTable& table,
                                 std::size_t skip_top = 2000, std::size_t v_prime_size = 9000);

/// One word per line; blank lines and `#` comments skipped. Internal spaces
/// become underscores so multi-word entries stay single keys.
std::vector<std::string> load_word_list(const std::filesystem::path& path);

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path,
                                               bool lowercase = true);

}  // namespace kgimpute
