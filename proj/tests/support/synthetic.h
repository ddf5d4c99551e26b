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

// Synthetic knowledge world for end-to-end tests: clustered ground-truth
// embeddings, definitions whose token overlap follows the clusters, and a
// set of held-out words that act as OOV.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kgimpute/evaluate.h"
#include "kgimpute/grounding.h"

namespace kgimpute::testing {

struct SyntheticOptions {
  int concepts_per_cluster = 15;
  int clusters = 4;
  int dim = 20;
  int held_out_per_cluster = 3;
  int descriptors_per_cluster = 10;
  int related_per_concept = 3;
  double center_norm = 4.0;
  double concept_noise = 0.4;
  double descriptor_scale = 0.5;
  double related_noise = 0.5;
  std::uint64_t seed = 7;
};

struct SyntheticWorld {
  std::vector<std::string> concepts;
  std::vector<int> cluster;         // per concept
  EmbeddingTable truth;             // every concept, including held-out ones
  EmbeddingTable table;             // pre-trained dictionary: no held-out concepts
  std::vector<std::string> held_out;
  std::vector<GroundingRecord> records;  // one per concept
  FrequencyList frequency;
  std::size_t skip_top = 1;
  SimilarityDataset dataset;

  /// Writes embeddings.txt, corpus.tsv, freq.txt, oov.txt, dataset.tsv.
  void write(const std::filesystem::path& dir) const;
};

SyntheticWorld make_synthetic_world(const SyntheticOptions& opts = {});

/// Fraction of a's tokens also in b.
double shared_fraction(const TokenSet& a, const TokenSet& b);

}  // namespace kgimpute::testing
