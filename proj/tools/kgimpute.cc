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

// kgimpute: impute embeddings for out-of-vocabulary words from a
// definition-overlap knowledge graph.

#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "kgimpute/pipeline.h"

#ifndef KGIMPUTE_VERSION
#define KGIMPUTE_VERSION "dev"
#endif

namespace {

using namespace kgimpute;

const std::map<std::string, OptimizerKind> kOptimizers{{"adam", OptimizerKind::adam}, {"sgd", OptimizerKind::sgd}};
const std::map<std::string, ImputeMode> kModes{{"gnn", ImputeMode::gnn},
                                               {"node-feature", ImputeMode::node_feature},
                                               {"node_feature", ImputeMode::node_feature}};

void add_text_options(CLI::App* app, TextOptions& text) {
  app->add_flag("--keep-case{false}", text.lowercase, "Do not lowercase grounding tokens or dataset words");
  app->add_flag("--keep-digits", text.keep_digits, "Keep digit-only tokens");
  app->add_option("--stopword-file", text.stopword_file, "Tokens to drop from grounding text")
      ->check(CLI::ExistingFile);
}

void add_train_options(CLI::App* app, TrainConfig& cfg) {
  app->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--lr", cfg.learning_rate, "Learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--layers", cfg.layers, "Graph convolutions T")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--hidden-dims", cfg.hidden_dims, "Hidden widths d_1..d_{T-1} (default: embedding dim)");
  app->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app->add_option("--optimizer", cfg.optimizer, "adam or sgd")
      ->transform(CLI::CheckedTransformer(kOptimizers, CLI::ignore_case))
      ->default_str("adam");
  app->add_option("--val-fraction", cfg.val_fraction, "Supervised nodes held out for early stopping")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.999999));
  app->add_option("--patience", cfg.patience, "Early-stopping patience in epochs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impute embeddings for out-of-vocabulary words with a knowledge-graph GCN"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Configuration file; keys for run-all go under a [run-all] section");
  app.set_version_flag("--version", std::string("kgimpute ") + KGIMPUTE_VERSION + " (Eigen " +
                                        std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION) + ", built " + __DATE__ + ")");

  // fetch
  auto* fetch = app.add_subcommand("fetch", "Assemble a grounding corpus from Wikipedia and Wiktionary");
  std::filesystem::path words_file, cache_dir, fetch_out;
  FetchOptions fetch_opts;
  fetch->add_option("--words", words_file, "Words to fetch, one per line")->required()->check(CLI::ExistingFile);
  fetch->add_option("--cache", cache_dir, "Cache directory")->required();
  fetch->add_option("--out", fetch_out, "Output corpus TSV")->required();
  fetch->add_flag("--offline", fetch_opts.offline, "Use only cached entries");
  fetch->add_option("--max-rps", fetch_opts.max_rps, "Request rate limit")->capture_default_str()->check(CLI::PositiveNumber);
  fetch->add_option("--summary-url", fetch_opts.endpoints.summary, "Page-summary endpoint base")->capture_default_str();
  fetch->add_option("--definition-url", fetch_opts.endpoints.definition, "Definition endpoint base")->capture_default_str();
  fetch->add_option("--search-url", fetch_opts.endpoints.search, "Title search endpoint base")->capture_default_str();

  // build-graph
  auto* build = app.add_subcommand("build-graph", "Build the knowledge graph");
  BuildGraphArgs bg;
  build->add_option("--embeddings", bg.embeddings, "Pre-trained embeddings")->required()->check(CLI::ExistingFile);
  build->add_option("--corpus", bg.corpus, "Grounding corpus TSV")->required();
  build->add_option("--freq", bg.frequency, "Frequency list")->required()->check(CLI::ExistingFile);
  build->add_option("--oov", bg.oov, "OOV words, one per line")->check(CLI::ExistingFile);
  build->add_option("--eta", bg.eta, "Jaccard edge threshold")->capture_default_str()->check(CLI::Range(0.0, 0.999999));
  build->add_option("--skip-top", bg.skip_top, "Most frequent words to skip")->capture_default_str();
  build->add_option("--vprime", bg.v_prime_size, "Number of pre-trained nodes |V'|")->capture_default_str();
  build->add_option("--out", bg.out, "Output graph file")->required();
  build->add_option("--report", bg.report, "JSON report of ungrounded nodes");
  add_text_options(build, bg.text);

  // train
  auto* trn = app.add_subcommand("train", "Train the GCN on a graph");
  std::filesystem::path train_graph, train_out, train_report;
  TrainConfig train_cfg;
  trn->add_option("--graph", train_graph, "Graph file")->required()->check(CLI::ExistingFile);
  trn->add_option("--out", train_out, "Output model file")->required();
  trn->add_option("--report", train_report, "Per-epoch JSON lines report");
  add_train_options(trn, train_cfg);

  // impute
  auto* imp = app.add_subcommand("impute", "Write embeddings with imputed OOV vectors");
  std::filesystem::path imp_graph, imp_model, imp_emb, imp_out, imp_report;
  ImputeMode imp_mode = ImputeMode::gnn;
  bool oov_only = false;
  imp->add_option("--graph", imp_graph, "Graph file")->required()->check(CLI::ExistingFile);
  imp->add_option("--model", imp_model, "Model file (required for --mode gnn)")->check(CLI::ExistingFile);
  imp->add_option("--embeddings", imp_emb, "Pre-trained embeddings")->required()->check(CLI::ExistingFile);
  imp->add_option("--mode", imp_mode, "gnn or node-feature")
      ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case))
      ->default_str("gnn");
  imp->add_option("--out", imp_out, "Output embedding file")->required();
  imp->add_option("--report", imp_report, "JSON provenance report");
  imp->add_flag("--oov-only", oov_only, "Write only the requested OOV words");

  // eval
  auto* ev = app.add_subcommand("eval", "Score embeddings on word-pair similarity datasets");
  std::filesystem::path ev_emb, ev_out;
  std::vector<std::filesystem::path> ev_datasets;
  bool ev_lowercase = true;
  ev->add_option("--embeddings", ev_emb, "Embeddings to score")->required()->check(CLI::ExistingFile);
  ev->add_option("--dataset", ev_datasets, "word1<TAB>word2<TAB>score file (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--out", ev_out, "results.json")->required();
  ev->add_flag("--keep-case{false}", ev_lowercase, "Do not retry lookups lowercased");

  // run-all
  auto* all = app.add_subcommand("run-all", "Run build-graph, train, impute and eval (and optionally fetch)");
  PipelineConfig pc;
  all->add_option("--embeddings", pc.embeddings, "Pre-trained embeddings")->required();
  all->add_option("--corpus", pc.corpus, "Grounding corpus TSV (written when --fetch is set)");
  all->add_option("--freq", pc.frequency, "Frequency list")->required();
  all->add_option("--oov", pc.oov, "OOV words");
  all->add_option("--dataset", pc.datasets, "Similarity dataset (repeatable)")->required();
  all->add_option("--work-dir", pc.work_dir, "Directory for intermediate artifacts")->capture_default_str();
  all->add_flag("--fetch", pc.fetch, "Fetch the corpus before building the graph");
  all->add_option("--cache", pc.cache_dir, "Fetch cache directory")->capture_default_str();
  all->add_flag("--offline", pc.offline, "Fetch from the cache only");
  all->add_option("--max-rps", pc.max_rps, "Fetch rate limit")->capture_default_str();
  all->add_option("--eta", pc.eta, "Jaccard edge threshold")->capture_default_str()->check(CLI::Range(0.0, 0.999999));
  all->add_option("--skip-top", pc.skip_top, "Most frequent words to skip")->capture_default_str();
  all->add_option("--vprime", pc.v_prime_size, "Number of pre-trained nodes |V'|")->capture_default_str();
  all->add_option("--mode", pc.mode, "gnn or node-feature")
      ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case))
      ->default_str("gnn");
  add_text_options(all, pc.text);
  add_train_options(all, pc.train);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fetch->parsed()) {
      FetchCache cache(cache_dir);
      SystemClock clock;
      auto http = fetch_opts.offline ? nullptr : make_http_client();
      WikiFetcher fetcher(cache, http.get(), clock, fetch_opts);
      const auto c = fetcher.build_corpus(load_word_list(words_file), fetch_out);
      std::cerr << "fetch: ok=" << c.ok << " not_found=" << c.not_found << " error=" << c.error << '\n';
    } else if (build->parsed()) {
      const auto s = run_build_graph(bg);
      std::cerr << "build-graph: " << s.nodes << " nodes (" << s.oov_nodes << " OOV), " << s.edges << " edges, "
                << s.ungrounded << " without grounding\n";
    } else if (trn->parsed()) {
      const auto r = run_train(train_graph, train_out, train_cfg, train_report);
      const auto& best = r.epochs[static_cast<std::size_t>(r.best_epoch - 1)];
      std::cerr << "train: " << r.epochs.size() << " epochs, best epoch " << r.best_epoch
                << " train_mse=" << best.train_mse;
      if (best.val_mse) std::cerr << " val_mse=" << *best.val_mse;
      std::cerr << '\n';
    } else if (imp->parsed()) {
      if (imp_mode == ImputeMode::gnn && imp_model.empty()) throw Error("--model is required for --mode gnn");
      const auto r = run_impute(imp_graph, imp_model, imp_emb, imp_mode, imp_out, imp_report, oov_only);
      std::cerr << "impute: " << r.words.size() << " words, " << r.report.size() << " warnings\n";
    } else if (ev->parsed()) {
      for (const auto& r : run_eval(ev_emb, ev_datasets, ev_out, ev_lowercase))
        std::cout << r.dataset << ": pearson " << 100 * r.pearson_r << " spearman " << 100 * r.spearman_rho
                  << " missed words " << r.missed_words_pct << "% missed pairs " << r.missed_pairs_pct << "% ("
                  << r.n_pairs << " pairs)\n";
    } else if (all->parsed()) {
      run_all(pc);
      std::cerr << "run-all: artifacts in " << pc.work_dir.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
