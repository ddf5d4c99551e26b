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

#include "kgimpute/graph.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "binary_io.h"

namespace kgimpute {

namespace {

constexpr char kGraphMagic[8] = {'K', 'G', 'I', 'G', 'R', 'A', 'P', 'H'};
constexpr std::uint32_t kGraphVersion = 1;

double overlap_ratio(std::size_t inter, std::size_t size_a, std::size_t size_b) {
  const std::size_t uni = size_a + size_b - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

double jaccard(const TokenSet& a, const TokenSet& b) {
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  return overlap_ratio(inter, a.size(), b.size());
}

double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::size_t inter = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  return overlap_ratio(inter, a.size(), b.size());
}

std::vector<WeightedEdge> jaccard_edges(const std::vector<std::vector<std::uint32_t>>& sets,
                                        double eta) {
  const std::size_t n = sets.size();
  std::uint32_t max_id = 0;
  for (const auto& s : sets)
    if (!s.empty()) max_id = std::max(max_id, s.back());

  // token id -> ascending node list
  std::vector<std::vector<std::uint32_t>> postings(static_cast<std::size_t>(max_id) + 1);
  for (std::size_t v = 0; v < n; ++v)
    for (auto t : sets[v]) postings[t].push_back(static_cast<std::uint32_t>(v));

  std::vector<WeightedEdge> edges;
  std::vector<std::uint32_t> counts(n, 0);
  std::vector<std::uint32_t> touched;
  for (std::size_t v = 0; v < n; ++v) {
    touched.clear();
    for (auto t : sets[v]) {
      const auto& plist = postings[t];
      auto it = std::upper_bound(plist.begin(), plist.end(), static_cast<std::uint32_t>(v));
      for (; it != plist.end(); ++it)
        if (counts[*it]++ == 0) touched.push_back(*it);
    }
    std::sort(touched.begin(), touched.end());
    for (auto u : touched) {
      const double w = overlap_ratio(counts[u], sets[v].size(), sets[u].size());
      if (w > eta) edges.push_back({static_cast<std::uint32_t>(v), u, w});
      counts[u] = 0;
    }
  }
  return edges;
}

WeightedAdjacency::WeightedAdjacency(std::size_t num_nodes, std::span<const WeightedEdge> edges) {
  offsets_.assign(num_nodes + 1, 0);
  for (const auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) throw Error("edge endpoint out of range");
    if (e.u == e.v) throw Error("self edges are not stored");
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t v = 0; v < num_nodes; ++v) offsets_[v + 1] += offsets_[v];
  indices_.resize(offsets_.back());
  weights_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges) {
    indices_[fill[e.u]] = e.v;
    weights_[fill[e.u]++] = e.weight;
    indices_[fill[e.v]] = e.u;
    weights_[fill[e.v]++] = e.weight;
  }
  // sort each row by neighbor index
  std::vector<std::pair<std::uint32_t, double>> row;
  for (std::size_t v = 0; v < num_nodes; ++v) {
    row.clear();
    for (std::size_t k = offsets_[v]; k < offsets_[v + 1]; ++k) row.emplace_back(indices_[k], weights_[k]);
    std::sort(row.begin(), row.end());
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0 && row[k].first == row[k - 1].first) throw Error("duplicate edge");
      indices_[offsets_[v] + k] = row[k].first;
      weights_[offsets_[v] + k] = row[k].second;
    }
  }
}

double WeightedAdjacency::normalizer(std::size_t v) const {
  double c = 1.0;
  for (double w : weights(v)) c += w;
  return c;
}

std::vector<WeightedEdge> WeightedAdjacency::edges() const {
  std::vector<WeightedEdge> out;
  for (std::size_t v = 0; v < num_nodes(); ++v) {
    auto nb = neighbors(v);
    auto ws = weights(v);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (nb[k] > v) out.push_back({static_cast<std::uint32_t>(v), nb[k], ws[k]});
  }
  return out;
}

std::vector<std::size_t> KnowledgeGraph::supervised_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (is_supervised(v)) out.push_back(v);
  return out;
}

std::optional<std::size_t> KnowledgeGraph::index_of(const std::string& word) const {
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (nodes[v].word == word) return v;
  return std::nullopt;
}

void KnowledgeGraph::validate() const {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  if (n == 0) throw Error("graph has no nodes");
  if (features.cols() != n || targets.cols() != n || targets.rows() != features.rows())
    throw Error("graph feature/target shapes do not match node count");
  if (adjacency.num_nodes() != nodes.size()) throw Error("adjacency size does not match node count");
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    auto nb = adjacency.neighbors(v);
    auto ws = adjacency.weights(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] == v) throw Error("self edge at node " + std::to_string(v));
      if (!(ws[k] > eta && ws[k] <= 1.0)) throw Error("edge weight outside (eta, 1]");
      auto rnb = adjacency.neighbors(nb[k]);
      auto it = std::lower_bound(rnb.begin(), rnb.end(), static_cast<std::uint32_t>(v));
      if (it == rnb.end() || *it != v || adjacency.weights(nb[k])[it - rnb.begin()] != ws[k])
        throw Error("adjacency is not symmetric");
    }
    if (!is_supervised(v) && !targets.col(static_cast<Eigen::Index>(v)).isZero(0))
      throw Error("OOV node carries a target");
  }
  if (!features.allFinite() || !targets.allFinite()) throw Error("non-finite graph data");
}

Vector feature_vector(const TokenSet& tokens, const EmbeddingTable& table) {
  Vector f = Vector::Zero(table.dim());
  std::size_t count = 0;
  for (const auto& t : tokens) {
    if (auto vec = table.lookup(t)) {
      f += *vec;
      ++count;
    }
  }
  if (count > 0) f /= static_cast<double>(count);
  return f;
}

KnowledgeGraph build_graph(const VocabSelection& selection, const std::vector<std::string>& oov_words,
                           const GroundingCorpus& corpus, const EmbeddingTable& table,
                           const GraphBuildOptions& opts, GraphBuildReport* report) {
  if (!(opts.eta >= 0.0 && opts.eta < 1.0)) throw Error("eta must lie in [0, 1)");
  if (table.dim() <= 0) throw Error("embedding table is empty");

  KnowledgeGraph g;
  g.eta = opts.eta;
  g.skip_top = selection.skip_top;
  g.v_prime_size = selection.v_prime_size;

  std::unordered_map<std::string, std::size_t> seen;
  auto add_node = [&](const std::string& w) {
    if (seen.count(w)) return;
    seen.emplace(w, g.nodes.size());
    g.nodes.push_back({w, table.contains(w) ? NodeKind::pretrained : NodeKind::oov});
  };
  for (const auto& w : selection.selected) add_node(w);
  for (const auto& w : oov_words) add_node(w);
  if (g.nodes.empty()) throw Error("graph would have zero nodes");

  const auto n = g.nodes.size();
  const int dim = table.dim();
  g.features = Matrix::Zero(dim, static_cast<Eigen::Index>(n));
  g.targets = Matrix::Zero(dim, static_cast<Eigen::Index>(n));

  static const TokenSet kEmpty;
  std::vector<const TokenSet*> token_sets(n, &kEmpty);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& w = g.nodes[v].word;
    const GroundingRecord* rec = corpus.find(w);
    if (!rec && opts.lowercase_fallback) rec = corpus.find(to_lower(w));
    if (rec) {
      token_sets[v] = &rec->tokens;
    } else if (report) {
      report->ungrounded.push_back(w);
    }
    g.features.col(static_cast<Eigen::Index>(v)) = feature_vector(*token_sets[v], table);
    if (auto t = table.lookup(w)) g.targets.col(static_cast<Eigen::Index>(v)) = *t;
  }

  // global token ids in lexicographic order keep each id list sorted
  std::map<std::string_view, std::uint32_t> ids;
  for (const auto* ts : token_sets)
    for (const auto& t : *ts) ids.emplace(t, 0);
  std::uint32_t next = 0;
  for (auto& [tok, id] : ids) id = next++;
  std::vector<std::vector<std::uint32_t>> id_sets(n);
  for (std::size_t v = 0; v < n; ++v) {
    id_sets[v].reserve(token_sets[v]->size());
    for (const auto& t : *token_sets[v]) id_sets[v].push_back(ids.at(t));
  }

  const auto edges = jaccard_edges(id_sets, opts.eta);
  g.adjacency = WeightedAdjacency(n, edges);
  return g;
}

void save_graph(const KnowledgeGraph& g, const std::filesystem::path& path) {
  g.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write graph file " + path.string());
  detail::BinaryWriter w(out);
  w.put_bytes(kGraphMagic, sizeof(kGraphMagic));
  w.put<std::uint32_t>(kGraphVersion);
  w.put<double>(g.eta);
  w.put<std::uint64_t>(g.skip_top);
  w.put<std::uint64_t>(g.v_prime_size);
  w.put<std::uint64_t>(static_cast<std::uint64_t>(g.dim()));
  w.put<std::uint64_t>(g.num_nodes());
  for (const auto& node : g.nodes) {
    w.put_string(node.word);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(node.kind));
  }
  const auto edges = g.adjacency.edges();
  w.put<std::uint64_t>(edges.size());
  for (const auto& e : edges) {
    w.put<std::uint32_t>(e.u);
    w.put<std::uint32_t>(e.v);
    w.put<double>(e.weight);
  }
  w.put_matrix(g.features);
  for (std::size_t v = 0; v < g.num_nodes(); ++v)
    if (g.is_supervised(v)) w.put_matrix(g.targets.col(static_cast<Eigen::Index>(v)));
  if (!out) throw Error("write failed for " + path.string());
}

KnowledgeGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open graph file " + path.string());
  detail::BinaryReader r(in, path.string());
  char magic[sizeof(kGraphMagic)];
  r.get_bytes(magic, sizeof(magic));
  if (!std::equal(magic, magic + sizeof(magic), kGraphMagic)) throw Error(path.string() + ": not a graph file");
  const auto version = r.get<std::uint32_t>();
  if (version != kGraphVersion)
    throw Error(path.string() + ": unsupported graph version " + std::to_string(version));

  KnowledgeGraph g;
  g.eta = r.get<double>();
  g.skip_top = r.get<std::uint64_t>();
  g.v_prime_size = r.get<std::uint64_t>();
  const auto dim = static_cast<Eigen::Index>(r.get<std::uint64_t>());
  const auto n = r.get<std::uint64_t>();
  if (dim <= 0 || dim > (1 << 20) || n > (1u << 30)) throw Error(path.string() + ": corrupt header");
  g.nodes.reserve(n);
  for (std::uint64_t v = 0; v < n; ++v) {
    std::string word = r.get_string();
    const auto kind = r.get<std::uint8_t>();
    if (kind > 1) throw Error(path.string() + ": corrupt node kind");
    g.nodes.push_back({std::move(word), static_cast<NodeKind>(kind)});
  }
  const auto m = r.get<std::uint64_t>();
  if (m > n * n) throw Error(path.string() + ": corrupt edge count");
  std::vector<WeightedEdge> edges(m);
  for (auto& e : edges) {
    e.u = r.get<std::uint32_t>();
    e.v = r.get<std::uint32_t>();
    e.weight = r.get<double>();
  }
  g.adjacency = WeightedAdjacency(n, edges);
  g.features = r.get_matrix(dim, static_cast<Eigen::Index>(n));
  g.targets = Matrix::Zero(dim, static_cast<Eigen::Index>(n));
  for (std::size_t v = 0; v < n; ++v)
    if (g.is_supervised(v)) g.targets.col(static_cast<Eigen::Index>(v)) = r.get_matrix(dim, 1);
  r.expect_end();
  g.validate();
  return g;
}

}  // namespace kgimpute
