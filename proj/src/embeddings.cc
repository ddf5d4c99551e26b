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

#include "kgimpute/embeddings.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kgimpute {

namespace {

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

bool is_integer(std::string_view tok) {
  if (tok.empty()) return false;
  for (char c : tok)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

EmbeddingTable::EmbeddingTable(int dim) : dim_(dim) {
  if (dim <= 0) throw Error("embedding dimension must be positive");
}

bool EmbeddingTable::insert(std::string word, const Eigen::Ref<const Vector>& vec) {
  if (dim_ <= 0) throw Error("embedding table has no dimension");
  if (vec.size() != dim_)
    throw Error("vector for '" + word + "' has length " + std::to_string(vec.size()) +
                ", expected " + std::to_string(dim_));
  if (!vec.allFinite()) throw Error("vector for '" + word + "' has non-finite components");
  if (index_.count(word)) return false;
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  data_.insert(data_.end(), vec.data(), vec.data() + vec.size());
  return true;
}

std::optional<ConstVectorMap> EmbeddingTable::lookup(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return vector(it->second);
}

EmbeddingLoad load_embeddings(const std::filesystem::path& path, std::optional<int> expected_dim) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file " + path.string());

  EmbeddingLoad result;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  Vector buf;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_whitespace(line);
    if (toks.empty()) continue;
    if (first_content) {
      first_content = false;
      if (toks.size() == 2 && is_integer(toks[0]) && is_integer(toks[1])) {
        result.header_skipped = true;
        continue;
      }
    }
    if (toks.size() < 2) throw ParseError(path.string(), lineno, "word without vector components");
    const int d = static_cast<int>(toks.size() - 1);
    if (result.table.dim() == 0) {
      if (expected_dim && *expected_dim != d)
        throw ParseError(path.string(), lineno,
                         "dimension mismatch: got " + std::to_string(d) + ", expected " +
                             std::to_string(*expected_dim));
      result.table = EmbeddingTable(d);
      buf.resize(d);
    } else if (d != result.table.dim()) {
      throw ParseError(path.string(), lineno,
                       "dimension mismatch: got " + std::to_string(d) + ", expected " +
                           std::to_string(result.table.dim()));
    }
    for (int k = 0; k < d; ++k) {
      if (!parse_double(toks[k + 1], buf[k]))
        throw ParseError(path.string(), lineno,
                         "non-numeric component '" + std::string(toks[k + 1]) + "'");
      if (!std::isfinite(buf[k]))
        throw ParseError(path.string(), lineno, "non-finite component");
    }
    if (!result.table.insert(std::string(toks[0]), buf)) ++result.duplicates;
  }
  if (result.table.empty()) throw Error("embedding file " + path.string() + " contains no vectors");
  return result;
}

std::string format_real(double x, int digits) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, digits);
  if (ec != std::errc()) throw Error("failed to format number");
  return std::string(buf, ptr);
}

void write_embedding_line(std::ostream& out, std::string_view word,
                          const Eigen::Ref<const Vector>& vec) {
  out << word;
  for (Eigen::Index k = 0; k < vec.size(); ++k) out << ' ' << format_real(vec[k]);
  out << '\n';
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write embedding file " + path.string());
  for (std::size_t i = 0; i < table.size(); ++i)
    write_embedding_line(out, table.words()[i], table.vector(i));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace kgimpute
