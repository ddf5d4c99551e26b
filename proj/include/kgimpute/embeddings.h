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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgimpute/common.h"

namespace kgimpute {

/// Word-to-vector dictionary loaded from a pre-trained embedding file.
///
/// Vectors are stored contiguously in insertion order. Lookups are exact:
/// no case folding or other normalization happens here.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  /// Adds `word` unless already present. Returns false for a duplicate.
  /// Throws on wrong length or non-finite components.
  bool insert(std::string word, const Eigen::Ref<const Vector>& vec);

  std::optional<ConstVectorMap> lookup(const std::string& word) const;
  bool contains(const std::string& word) const { return index_.count(word) != 0; }

  const std::vector<std::string>& words() const { return words_; }
  ConstVectorMap vector(std::size_t i) const {
    return ConstVectorMap(data_.data() + i * static_cast<std::size_t>(dim_), dim_);
  }

 private:
  int dim_ = 0;
  std::vector<std::string> words_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct EmbeddingLoad {
  EmbeddingTable table;
  std::size_t duplicates = 0;  // later occurrences dropped (first one wins)
  bool header_skipped = false;
};

/// Reads whitespace-separated `word v1 ... vd` lines. A leading
/// `<count> <dim>` header line is skipped.
EmbeddingLoad load_embeddings(const std::filesystem::path& path,
                              std::optional<int> expected_dim = std::nullopt);

/// Shortest text form of `x` with at most `digits` significant digits.
std::string format_real(double x, int digits = 9);

void write_embedding_line(std::ostream& out, std::string_view word,
                          const Eigen::Ref<const Vector>& vec);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

}  // namespace kgimpute
