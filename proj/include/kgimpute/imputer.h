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
#include <string>
#include <unordered_map>
#include <vector>

#include "kgimpute/gcn.h"

namespace kgimpute {

enum class ImputeMode { gnn, node_feature };
enum class Provenance { pretrained, imputed, node_feature_baseline, zero };

const char* to_string(Provenance p);
ImputeMode parse_impute_mode(const std::string& s);

struct ImputeWarning {
  std::string word;
  std::string reason;  // "not_in_graph" or "isolated_without_features"
};

struct ImputationResult {
  std::vector<std::string> words;  // request order, deduplicated
  std::unordered_map<std::string, Vector> vectors;
  std::unordered_map<std::string, Provenance> provenance;
  std::vector<ImputeWarning> report;
};

/// Vectors for `requested` words. Dictionary words pass through unchanged;
/// graph OOV nodes get h_v^T (gnn) or f_v (node_feature); anything else gets zeros.
ImputationResult impute(const KnowledgeGraph& g, const GcnModeld& model, const EmbeddingTable& table,
                        ImputeMode mode, const std::vector<std::string>& requested);

/// Same, requesting every OOV node of the graph.
ImputationResult impute(const KnowledgeGraph& g, const GcnModeld& model, const EmbeddingTable& table,
                        ImputeMode mode);

/// Writes the table (unless `oov_only`) followed by the imputed words not in it.
void save_imputed(const ImputationResult& result, const EmbeddingTable& table,
                  const std::filesystem::path& path, bool oov_only = false);

void write_impute_report(const ImputationResult& result, const std::filesystem::path& path);

}  // namespace kgimpute
