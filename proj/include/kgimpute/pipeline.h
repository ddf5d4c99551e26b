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
#include <vector>

#include "kgimpute/evaluate.h"
#include "kgimpute/imputer.h"
#include "kgimpute/trainer.h"
#include "kgimpute/wikifetch.h"

namespace kgimpute {

/// An error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct TextOptions {
  bool lowercase = true;
  bool keep_digits = false;
  std::filesystem::path stopword_file;

  TokenizerOptions tokenizer() const;
};

struct BuildGraphArgs {
  std::filesystem::path embeddings;
  std::filesystem::path corpus;
  std::filesystem::path frequency;
  std::filesystem::path oov;
  std::filesystem::path out;
  std::filesystem::path report;  // optional: ungrounded nodes as JSON
  double eta = 0.5;
  std::size_t skip_top = 2000;
  std::size_t v_prime_size = 9000;
  TextOptions text;
};

struct BuildGraphSummary {
  std::size_t nodes = 0;
  std::size_t oov_nodes = 0;
  std::size_t edges = 0;
  std::size_t ungrounded = 0;
};

BuildGraphSummary run_build_graph(const BuildGraphArgs& args);

/// Words to fetch for a graph: V' followed by the OOV list.
std::vector<std::string> graph_words(const std::filesystem::path& embeddings, const std::filesystem::path& frequency,
                                     const std::filesystem::path& oov, std::size_t skip_top, std::size_t v_prime_size);

TrainReport run_train(const std::filesystem::path& graph, const std::filesystem::path& model_out,
                      const TrainConfig& cfg, const std::filesystem::path& report_out = {});

ImputationResult run_impute(const std::filesystem::path& graph, const std::filesystem::path& model,
                            const std::filesystem::path& embeddings, ImputeMode mode,
                            const std::filesystem::path& out, const std::filesystem::path& report = {},
                            bool oov_only = false);

std::vector<EvalResult> run_eval(const std::filesystem::path& embeddings,
                                 const std::vector<std::filesystem::path>& datasets,
                                 const std::filesystem::path& out, bool lowercase = true);

/// Everything `run-all` needs. Defaults: eta 0.5, skip 2000, |V'| 9000, T = 3.
struct PipelineConfig {
  std::filesystem::path embeddings;
  std::filesystem::path corpus;
  std::filesystem::path frequency;
  std::filesystem::path oov;
  std::vector<std::filesystem::path> datasets;
  std::filesystem::path work_dir = "kgimpute-out";

  bool fetch = false;  // build `corpus` from the fetch cache first
  std::filesystem::path cache_dir = "wiki-cache";
  bool offline = false;
  double max_rps = 2.0;

  double eta = 0.5;
  std::size_t skip_top = 2000;
  std::size_t v_prime_size = 9000;
  TextOptions text;
  TrainConfig train;
  ImputeMode mode = ImputeMode::gnn;

  std::filesystem::path graph_path() const { return work_dir / "graph.kgg"; }
  std::filesystem::path model_path() const { return work_dir / "model.kgm"; }
  std::filesystem::path train_report_path() const { return work_dir / "train.jsonl"; }
  std::filesystem::path imputed_path() const { return work_dir / "imputed.txt"; }
  std::filesystem::path impute_report_path() const { return work_dir / "impute_report.json"; }
  std::filesystem::path results_path() const { return work_dir / "results.json"; }
  std::filesystem::path corpus_path() const { return corpus.empty() ? work_dir / "corpus.tsv" : corpus; }
};

/// fetch (optional) -> build-graph -> train -> impute -> eval. Throws
/// StageError naming the failing stage.
void run_all(const PipelineConfig& cfg);

}  // namespace kgimpute
