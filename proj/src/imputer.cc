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

#include "kgimpute/imputer.h"

#include <fstream>

#include "json.hpp"

namespace kgimpute {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::pretrained: return "pretrained";
    case Provenance::imputed: return "imputed";
    case Provenance::node_feature_baseline: return "node_feature_baseline";
    case Provenance::zero: return "zero";
  }
  return "unknown";
}

ImputeMode parse_impute_mode(const std::string& s) {
  if (s == "gnn") return ImputeMode::gnn;
  if (s == "node-feature" || s == "node_feature") return ImputeMode::node_feature;
  throw Error("unknown impute mode '" + s + "' (expected gnn or node-feature)");
}

ImputationResult impute(const KnowledgeGraph& g, const GcnModeld& model, const EmbeddingTable& table,
                        ImputeMode mode, const std::vector<std::string>& requested) {
  if (table.dim() != g.dim())
    throw Error("embedding dim " + std::to_string(table.dim()) + " does not match graph dim " +
                std::to_string(g.dim()));
  if (mode == ImputeMode::gnn) {
    const auto dims = model.dims();
    if (dims.empty() || dims.front() != g.dim() || dims.back() != table.dim())
      throw Error("model dimensions do not match the graph and embedding table");
  }

  std::unordered_map<std::string, std::size_t> node_index;
  for (std::size_t v = 0; v < g.num_nodes(); ++v) node_index.emplace(g.nodes[v].word, v);

  Matrix output;
  if (mode == ImputeMode::gnn) output = forward(g, model).output();

  ImputationResult result;
  for (const auto& w : requested) {
    if (result.provenance.count(w)) continue;
    result.words.push_back(w);
    if (auto vec = table.lookup(w)) {
      result.vectors.emplace(w, *vec);
      result.provenance.emplace(w, Provenance::pretrained);
      continue;
    }
    auto it = node_index.find(w);
    if (it == node_index.end()) {
      result.vectors.emplace(w, Vector::Zero(table.dim()));
      result.provenance.emplace(w, Provenance::zero);
      result.report.push_back({w, "not_in_graph"});
      continue;
    }
    const auto c = static_cast<Eigen::Index>(it->second);
    if (g.adjacency.degree(it->second) == 0 && g.features.col(c).isZero(0))
      result.report.push_back({w, "isolated_without_features"});
    if (mode == ImputeMode::gnn) {
      result.vectors.emplace(w, output.col(c));
      result.provenance.emplace(w, Provenance::imputed);
    } else {
      result.vectors.emplace(w, g.features.col(c));
      result.provenance.emplace(w, Provenance::node_feature_baseline);
    }
  }
  return result;
}

ImputationResult impute(const KnowledgeGraph& g, const GcnModeld& model, const EmbeddingTable& table,
                        ImputeMode mode) {
  std::vector<std::string> oov;
  for (const auto& node : g.nodes)
    if (node.kind == NodeKind::oov) oov.push_back(node.word);
  return impute(g, model, table, mode, oov);
}

void save_imputed(const ImputationResult& result, const EmbeddingTable& table,
                  const std::filesystem::path& path, bool oov_only) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write embedding file " + path.string());
  if (!oov_only)
    for (std::size_t i = 0; i < table.size(); ++i) write_embedding_line(out, table.words()[i], table.vector(i));
  for (const auto& w : result.words) {
    if (!oov_only && table.contains(w)) continue;
    // emitted at single precision
    write_embedding_line(out, w, result.vectors.at(w).cast<float>().cast<double>());
  }
  if (!out) throw Error("write failed for " + path.string());
}

void write_impute_report(const ImputationResult& result, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json counts = {{"pretrained", 0}, {"imputed", 0}, {"node_feature_baseline", 0}, {"zero", 0}};
  nlohmann::ordered_json words = nlohmann::ordered_json::object();
  for (const auto& w : result.words) {
    const char* p = to_string(result.provenance.at(w));
    counts[p] = counts[p].get<int>() + 1;
    words[w] = p;
  }
  nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
  for (const auto& warn : result.report) warnings.push_back({{"word", warn.word}, {"reason", warn.reason}});
  j["counts"] = counts;
  j["warnings"] = warnings;
  j["provenance"] = words;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace kgimpute
