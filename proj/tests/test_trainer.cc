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

#include <random>

#include "doctest.h"
#include "kgimpute/trainer.h"
#include "oracles.h"
#include "tempdir.h"

using namespace kgimpute;
namespace kt = kgimpute::testing;

namespace {

KnowledgeGraph tiny_graph() {
  // 5 nodes, 1 edge, one OOV node
  std::mt19937_64 rng(21);
  KnowledgeGraph g;
  const WeightedEdge e{0, 1, 0.8};
  g.adjacency = WeightedAdjacency(5, std::span(&e, 1));
  g.features = kt::random_matrix(rng, 3, 5);
  g.targets = kt::random_matrix(rng, 3, 5);
  for (int v = 0; v < 5; ++v) g.nodes.push_back({"n" + std::to_string(v), v == 4 ? NodeKind::oov : NodeKind::pretrained});
  g.targets.col(4).setZero();
  return g;
}

}  // namespace

TEST_CASE("mse_loss") {
  KnowledgeGraph g;
  g.nodes = {{"a", NodeKind::pretrained}, {"b", NodeKind::oov}};
  g.targets = Matrix::Zero(2, 2);
  g.features = Matrix::Zero(2, 2);
  g.adjacency = WeightedAdjacency(2, {});

  Matrix out = Matrix::Zero(2, 2);
  auto r = mse_loss(out, g, std::vector<std::size_t>{0});
  CHECK(r.loss == 0.0);
  CHECK(r.grad_out.isZero(0));

  out(0, 0) = 1.0;
  out(1, 1) = 7.0;  // OOV output is ignored
  r = mse_loss(out, g, std::vector<std::size_t>{0});
  CHECK(r.loss == 0.5);
  CHECK(r.grad_out.col(0) == Vector::Unit(2, 0));
  CHECK(r.grad_out.col(1).isZero(0));

  CHECK_THROWS_AS(mse_loss(out, g, std::vector<std::size_t>{}), Error);
  CHECK_THROWS_AS(mse_loss(out, g, std::vector<std::size_t>{1}), Error);
}

TEST_CASE("training reduces the loss on a tiny graph") {
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.val_fraction = 0.0;
  const auto r = train(tiny_graph(), cfg);
  REQUIRE(r.report.epochs.size() == 50);
  CHECK(r.report.epochs.back().train_mse < r.report.epochs.front().train_mse);
  const auto g = tiny_graph();
  CHECK(mse(forward(g, r.model).output(), g, r.report.train_nodes) < r.report.epochs.front().train_mse);
}

TEST_CASE("training is deterministic for a fixed seed") {
  std::mt19937_64 rng(22);
  const auto g = kt::random_graph(rng, 30, 4, 0.2);
  TrainConfig cfg;
  cfg.epochs = 40;
  const auto a = train(g, cfg);
  const auto b = train(g, cfg);
  REQUIRE(a.report.epochs.size() == b.report.epochs.size());
  for (std::size_t i = 0; i < a.report.epochs.size(); ++i) {
    CHECK(a.report.epochs[i].train_mse == b.report.epochs[i].train_mse);
    CHECK(a.report.epochs[i].val_mse == b.report.epochs[i].val_mse);
  }
  CHECK(a.report.best_epoch == b.report.best_epoch);
  CHECK(a.report.val_nodes == b.report.val_nodes);
  for (std::size_t t = 0; t < a.model.layers.size(); ++t) CHECK(a.model.layers[t].weight == b.model.layers[t].weight);

  kt::TempDir dir;
  save_model(a.model, dir / "a.kgm");
  save_model(b.model, dir / "b.kgm");
  CHECK(kt::read_file(dir / "a.kgm") == kt::read_file(dir / "b.kgm"));

  cfg.seed = 7;
  CHECK(train(g, cfg).model.layers[0].weight != a.model.layers[0].weight);
}

TEST_CASE("validation split and early stopping") {
  std::mt19937_64 rng(23);
  const auto g = kt::random_graph(rng, 40, 3, 0.2);
  TrainConfig cfg;
  cfg.epochs = 400;
  cfg.learning_rate = 0.05;
  cfg.patience = 5;
  const auto r = train(g, cfg);
  const auto n_sup = g.supervised_nodes().size();
  CHECK(r.report.val_nodes.size() == std::max<std::size_t>(1, n_sup / 10));
  CHECK(r.report.val_nodes.size() + r.report.train_nodes.size() == n_sup);
  CHECK(r.report.epochs.size() <= 400u);

  // best epoch has the minimal validation loss, and the returned model reproduces it
  double best = 1e300;
  for (const auto& e : r.report.epochs) best = std::min(best, *e.val_mse);
  CHECK(*r.report.epochs[r.report.best_epoch - 1].val_mse == best);
  CHECK(std::abs(mse(forward(g, r.model).output(), g, r.report.val_nodes) - best) < 1e-10);

  cfg.val_fraction = 0.0;
  cfg.epochs = 30;
  const auto all = train(g, cfg);
  CHECK(all.report.epochs.size() == 30);
  CHECK(all.report.val_nodes.empty());
  CHECK_FALSE(all.report.epochs.front().val_mse);
}

TEST_CASE("one node, one linear layer: Adam reaches the target") {
  KnowledgeGraph g;
  g.nodes = {{"x", NodeKind::pretrained}};
  g.adjacency = WeightedAdjacency(1, {});
  g.features = Matrix(3, 1);
  g.features << 0.2, -0.7, 1.1;
  g.targets = Matrix(3, 1);
  g.targets << 0.9, 0.1, -0.4;
  TrainConfig cfg;
  cfg.layers = 1;
  cfg.epochs = 2000;
  cfg.val_fraction = 0.0;
  const auto r = train(g, cfg);
  const Matrix out = forward(g, r.model).output();
  CHECK((out - g.targets).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("divergence is reported with the epoch") {
  TrainConfig cfg;
  cfg.optimizer = OptimizerKind::sgd;
  cfg.learning_rate = 1e6;
  cfg.val_fraction = 0.0;
  CHECK_THROWS_WITH_AS(train(tiny_graph(), cfg), doctest::Contains("diverged at epoch"), Error);
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  cfg.layers = 3;
  cfg.hidden_dims = {8};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.hidden_dims = {8, 6};
  CHECK(cfg.layer_dims(4) == std::vector<int>{4, 8, 6, 4});
  cfg.val_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);

  KnowledgeGraph one;
  one.nodes = {{"x", NodeKind::pretrained}};
  one.adjacency = WeightedAdjacency(1, {});
  one.features = one.targets = Matrix::Zero(2, 1);
  CHECK_THROWS_AS(train(one, TrainConfig{}), Error);
}

TEST_CASE("hidden widths") {
  TrainConfig cfg;
  cfg.hidden_dims = {7, 5};
  cfg.epochs = 3;
  const auto r = train(tiny_graph(), cfg);
  CHECK(r.model.dims() == std::vector<int>{3, 7, 5, 3});
}

TEST_CASE("train report is written as JSON lines") {
  TrainConfig cfg;
  cfg.epochs = 4;
  const auto r = train(tiny_graph(), cfg);
  kt::TempDir dir;
  write_train_report(r.report, dir / "r.jsonl");
  const auto text = kt::read_file(dir / "r.jsonl");
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.rfind("{\"epoch\":1,\"train_mse\":", 0) == 0);
}
