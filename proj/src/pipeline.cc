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

#include "kgimpute/pipeline.h"

#include <fstream>

#include "json.hpp"

namespace kgimpute {

TokenizerOptions TextOptions::tokenizer() const {
  TokenizerOptions t;
  t.lowercase = lowercase;
  t.keep_digits = keep_digits;
  if (!stopword_file.empty()) t.stopwords = load_stopwords(stopword_file, lowercase);
  return t;
}

BuildGraphSummary run_build_graph(const BuildGraphArgs& args) {
  const auto table = load_embeddings(args.embeddings).table;
  const auto corpus = load_grounding_corpus(args.corpus, args.text.tokenizer());
  const auto freq = load_frequency_list(args.frequency);
  const auto oov = args.oov.empty() ? std::vector<std::string>{} : load_word_list(args.oov);
  const auto selection = select_vocabulary(freq, table, args.skip_top, args.v_prime_size);

  GraphBuildOptions opts;
  opts.eta = args.eta;
  opts.lowercase_fallback = args.text.lowercase;
  GraphBuildReport report;
  const auto g = build_graph(selection, oov, corpus, table, opts, &report);
  save_graph(g, args.out);

  if (!args.report.empty()) {
    nlohmann::ordered_json j;
    j["nodes"] = g.num_nodes();
    j["edges"] = g.adjacency.num_edges();
    j["ungrounded"] = report.ungrounded;
    std::ofstream out(args.report, std::ios::binary);
    if (!out) throw Error("cannot write report " + args.report.string());
    out << j.dump(2) << '\n';
  }

  BuildGraphSummary s;
  s.nodes = g.num_nodes();
  s.oov_nodes = g.num_nodes() - g.supervised_nodes().size();
  s.edges = g.adjacency.num_edges();
  s.ungrounded = report.ungrounded.size();
  return s;
}

std::vector<std::string> graph_words(const std::filesystem::path& embeddings, const std::filesystem::path& frequency,
                                     const std::filesystem::path& oov, std::size_t skip_top, std::size_t v_prime_size) {
  const auto table = load_embeddings(embeddings).table;
  auto words = select_vocabulary(load_frequency_list(frequency), table, skip_top, v_prime_size).selected;
  if (!oov.empty())
    for (auto& w : load_word_list(oov)) words.push_back(std::move(w));
  return words;
}

TrainReport run_train(const std::filesystem::path& graph, const std::filesystem::path& model_out,
                      const TrainConfig& cfg, const std::filesystem::path& report_out) {
  const auto g = load_graph(graph);
  auto result = train(g, cfg);
  save_model(result.model, model_out);
  if (!report_out.empty()) write_train_report(result.report, report_out);
  return result.report;
}

ImputationResult run_impute(const std::filesystem::path& graph, const std::filesystem::path& model,
                            const std::filesystem::path& embeddings, ImputeMode mode,
                            const std::filesystem::path& out, const std::filesystem::path& report, bool oov_only) {
  const auto g = load_graph(graph);
  const auto m = mode == ImputeMode::gnn || !model.empty() ? load_model(model) : GcnModeld{};
  const auto table = load_embeddings(embeddings).table;
  auto result = impute(g, m, table, mode);
  save_imputed(result, table, out, oov_only);
  if (!report.empty()) write_impute_report(result, report);
  return result;
}

std::vector<EvalResult> run_eval(const std::filesystem::path& embeddings,
                                 const std::vector<std::filesystem::path>& datasets,
                                 const std::filesystem::path& out, bool lowercase) {
  if (datasets.empty()) throw Error("no evaluation datasets given");
  const auto table = load_embeddings(embeddings).table;
  std::vector<EvalResult> results;
  for (const auto& path : datasets) results.push_back(evaluate(load_dataset(path), table, lowercase));
  write_eval_results(results, out);
  return results;
}

namespace {

template <typename F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

void run_all(const PipelineConfig& cfg) {
  stage("setup", [&] {
    std::filesystem::create_directories(cfg.work_dir);
    return 0;
  });

  if (cfg.fetch) {
    stage("fetch", [&] {
      const auto words = graph_words(cfg.embeddings, cfg.frequency, cfg.oov, cfg.skip_top, cfg.v_prime_size);
      FetchOptions opts;
      opts.offline = cfg.offline;
      opts.max_rps = cfg.max_rps;
      return build_corpus(words, cfg.cache_dir, cfg.corpus_path(), opts);
    });
  }

  stage("build-graph", [&] {
    BuildGraphArgs args;
    args.embeddings = cfg.embeddings;
    args.corpus = cfg.corpus_path();
    args.frequency = cfg.frequency;
    args.oov = cfg.oov;
    args.out = cfg.graph_path();
    args.eta = cfg.eta;
    args.skip_top = cfg.skip_top;
    args.v_prime_size = cfg.v_prime_size;
    args.text = cfg.text;
    return run_build_graph(args);
  });

  stage("train", [&] { return run_train(cfg.graph_path(), cfg.model_path(), cfg.train, cfg.train_report_path()); });

  stage("impute", [&] {
    return run_impute(cfg.graph_path(), cfg.model_path(), cfg.embeddings, cfg.mode, cfg.imputed_path(),
                      cfg.impute_report_path());
  });

  stage("eval", [&] { return run_eval(cfg.imputed_path(), cfg.datasets, cfg.results_path(), cfg.text.lowercase); });
}

}  // namespace kgimpute
