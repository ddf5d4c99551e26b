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
#include <vector>

#include "kgimpute/gcn.h"

namespace kgimpute {

enum class OptimizerKind { sgd, adam };

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;
  /// Fraction of supervised nodes held out for early stopping; 0 disables it.
  double val_fraction = 0.1;
  int patience = 20;
  /// Number of graph convolutions T.
  int layers = 3;
  /// Widths d_1 .. d_{T-1}; empty means every hidden layer has the embedding width.
  std::vector<int> hidden_dims;

  void validate() const;
  std::vector<int> layer_dims(int embedding_dim) const;
};

struct EpochStats {
  int epoch;  // 1-based; losses are for the parameters before this epoch's update
  double train_mse;
  std::optional<double> val_mse;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;
  bool early_stopped = false;
  std::uint64_t seed = 0;
  std::vector<std::size_t> train_nodes;
  std::vector<std::size_t> val_nodes;
};

struct LossResult {
  double loss;
  Matrix grad_out;  // d x n, zero outside the subset
};

/// Mean over subset nodes and coordinates of (h_v^T - target_v)^2.
LossResult mse_loss(const Matrix& output, const KnowledgeGraph& g, std::span<const std::size_t> subset);
inline LossResult mse_loss(const ForwardTrace<double>& trace, const KnowledgeGraph& g,
                           std::span<const std::size_t> subset) {
  return mse_loss(trace.output(), g, subset);
}

/// Loss only.
double mse(const Matrix& output, const KnowledgeGraph& g, std::span<const std::size_t> subset);

/// In-place Adam over every layer parameter of a model.
class AdamOptimizer {
 public:
  AdamOptimizer(const GcnModeld& shape, double lr, double beta1, double beta2, double epsilon);
  void step(GcnModeld& model, const GcnGradients<double>& grads);

 private:
  double lr_, beta1_, beta2_, epsilon_;
  long steps_ = 0;
  std::vector<GcnLayer<double>> m_;
  std::vector<GcnLayer<double>> v_;
};

struct TrainResult {
  GcnModeld model;
  TrainReport report;
};

/// Full-batch training. With a validation split, returns the parameters with
/// the lowest validation loss; otherwise the parameters after the last epoch.
TrainResult train(const KnowledgeGraph& g, const TrainConfig& cfg);

/// One JSON object per line: {"epoch", "train_mse", "val_mse", "best"}.
void write_train_report(const TrainReport& report, const std::filesystem::path& path);

}  // namespace kgimpute
