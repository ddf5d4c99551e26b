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
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgimpute/grounding.h"

namespace kgimpute {

double jaccard(const TokenSet& a, const TokenSet& b);

/// Jaccard coefficient of two sorted, duplicate-free id ranges.
double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

struct WeightedEdge {
  std::uint32_t u;
  std::uint32_t v;
  double weight;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// All pairs u < v with jaccard(sets[u], sets[v]) > eta, ordered by (u, v).
/// Each set must be sorted and duplicate-free. Uses an inverted index from
/// token id to the nodes containing it.
std::vector<WeightedEdge> jaccard_edges(const std::vector<std::vector<std::uint32_t>>& sets,
                                        double eta);

/// Symmetric CSR adjacency with per-entry weights. Self edges are not stored.
class WeightedAdjacency {
 public:
  WeightedAdjacency() = default;
  WeightedAdjacency(std::size_t num_nodes, std::span<const WeightedEdge> edges);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return indices_.size() / 2; }
  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }

  std::span<const std::uint32_t> neighbors(std::size_t v) const {
    return {indices_.data() + offsets_[v], degree(v)};
  }
  std::span<const double> weights(std::size_t v) const {
    return {weights_.data() + offsets_[v], degree(v)};
  }

  /// C_v = 1 + sum of incident edge weights.
  double normalizer(std::size_t v) const;

  /// Edges with u < v in (u, v) order.
  std::vector<WeightedEdge> edges() const;

  const std::vector<std::size_t>& offsets() const { return offsets_; }

  friend bool operator==(const WeightedAdjacency&, const WeightedAdjacency&) = default;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> indices_;
  std::vector<double> weights_;
};

enum class NodeKind : std::uint8_t { pretrained = 0, oov = 1 };

struct GraphNode {
  std::string word;
  NodeKind kind;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

/// K = (V, E) with per-node features (columns of `features`) and, for
/// pretrained nodes, supervision targets (columns of `targets`; zero for OOV).
struct KnowledgeGraph {
  std::vector<GraphNode> nodes;
  Matrix features;  // dim x n
  Matrix targets;   // dim x n
  WeightedAdjacency adjacency;
  double eta = 0.5;
  std::uint64_t skip_top = 0;
  std::uint64_t v_prime_size = 0;

  int dim() const { return static_cast<int>(features.rows()); }
  std::size_t num_nodes() const { return nodes.size(); }
  bool is_supervised(std::size_t v) const { return nodes[v].kind == NodeKind::pretrained; }
  std::vector<std::size_t> supervised_nodes() const;
  std::optional<std::size_t> index_of(const std::string& word) const;

  /// Throws if the structural invariants do not hold.
  void validate() const;

  friend bool operator==(const KnowledgeGraph&, const KnowledgeGraph&) = default;
};

struct GraphBuildOptions {
  double eta = 0.5;
  /// Retry corpus lookups with the lowercased word when the exact form is absent.
  bool lowercase_fallback = true;
};

struct GraphBuildReport {
  std::vector<std::string> ungrounded;  // nodes without a corpus record
};

/// Mean of the table vectors of the tokens present in `table`, or zero.
Vector feature_vector(const TokenSet& tokens, const EmbeddingTable& table);

KnowledgeGraph build_graph(const VocabSelection& selection, const std::vector<std::string>& oov_words,
                           const GroundingCorpus& corpus, const EmbeddingTable& table,
                           const GraphBuildOptions& opts = {}, GraphBuildReport* report = nullptr);

void save_graph(const KnowledgeGraph& g, const std::filesystem::path& path);
KnowledgeGraph load_graph(const std::filesystem::path& path);

}  // namespace kgimpute
