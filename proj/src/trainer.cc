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

#include "kgimpute/trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "json.hpp"

namespace kgimpute {

void TrainConfig::validate() const {
  if (epochs < 1) throw Error("epochs must be positive");
  if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw Error("val_fraction must lie in [0, 1)");
  if (patience < 1) throw Error("patience must be positive");
  if (layers < 1) throw Error("need at least one layer");
  if (!hidden_dims.empty() && hidden_dims.size() != static_cast<std::size_t>(layers - 1))
    throw Error("hidden_dims must list " + std::to_string(layers - 1) + " widths");
  for (int d : hidden_dims)
    if (d <= 0) throw Error("hidden widths must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0))
    throw Error("invalid Adam hyperparameters");
}

std::vector<int> TrainConfig::layer_dims(int embedding_dim) const {
  std::vector<int> dims{embedding_dim};
  for (int t = 1; t < layers; ++t) dims.push_back(hidden_dims.empty() ? embedding_dim : hidden_dims[t - 1]);
  dims.push_back(embedding_dim);
  return dims;
}

LossResult mse_loss(const Matrix& output, const KnowledgeGraph& g, std::span<const std::size_t> subset) {
  if (subset.empty()) throw Error("mse_loss needs a non-empty node subset");
  const double scale = 1.0 / (static_cast<double>(subset.size()) * static_cast<double>(output.rows()));
  LossResult r{0.0, Matrix::Zero(output.rows(), output.cols())};
  for (auto v : subset) {
    if (!g.is_supervised(v)) throw Error("node '" + g.nodes[v].word + "' has no target");
    const auto c = static_cast<Eigen::Index>(v);
    const Vector diff = output.col(c) - g.targets.col(c);
    r.loss += diff.squaredNorm();
    r.grad_out.col(c) = (2.0 * scale) * diff;
  }
  r.loss *= scale;
  return r;
}

double mse(const Matrix& output, const KnowledgeGraph& g, std::span<const std::size_t> subset) {
  if (subset.empty()) throw Error("mse needs a non-empty node subset");
  double sum = 0.0;
  for (auto v : subset) {
    const auto c = static_cast<Eigen::Index>(v);
    sum += (output.col(c) - g.targets.col(c)).squaredNorm();
  }
  return sum / (static_cast<double>(subset.size()) * static_cast<double>(output.rows()));
}

AdamOptimizer::AdamOptimizer(const GcnModeld& shape, double lr, double beta1, double beta2, double epsilon)
    : lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  for (const auto& l : shape.layers) {
    GcnLayer<double> zero{Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())};
    m_.push_back(zero);
    v_.push_back(zero);
  }
}

void AdamOptimizer::step(GcnModeld& model, const GcnGradients<double>& grads) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad.cwiseAbs2();
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon_);
  };
  for (std::size_t t = 0; t < model.layers.size(); ++t) {
    update(model.layers[t].weight, grads.layers[t].weight, m_[t].weight, v_[t].weight);
    update(model.layers[t].bias, grads.layers[t].bias, m_[t].bias, v_[t].bias);
  }
}

TrainResult train(const KnowledgeGraph& g, const TrainConfig& cfg) {
  cfg.validate();
  auto supervised = g.supervised_nodes();
  const std::size_t min_supervised = cfg.val_fraction > 0.0 ? 2 : 1;
  if (supervised.size() < min_supervised)
    throw Error("training needs at least " + std::to_string(min_supervised) + " supervised nodes");

  TrainResult result;
  TrainReport& report = result.report;
  report.seed = cfg.seed;

  std::size_t n_val = 0;
  if (cfg.val_fraction > 0.0) {
    n_val = static_cast<std::size_t>(std::floor(cfg.val_fraction * static_cast<double>(supervised.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, supervised.size() - 1);
  }
  std::seed_seq split_seed{cfg.seed, std::uint64_t{0x5eed}};
  std::mt19937_64 split_rng(split_seed);
  std::shuffle(supervised.begin(), supervised.end(), split_rng);
  report.val_nodes.assign(supervised.begin(), supervised.begin() + static_cast<std::ptrdiff_t>(n_val));
  report.train_nodes.assign(supervised.begin() + static_cast<std::ptrdiff_t>(n_val), supervised.end());
  std::sort(report.val_nodes.begin(), report.val_nodes.end());
  std::sort(report.train_nodes.begin(), report.train_nodes.end());

  GcnModeld model = glorot_model<double>(cfg.layer_dims(g.dim()), cfg.seed);
  AdamOptimizer adam(model, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);

  GcnModeld best = model;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto trace = forward(g, model);
    auto loss = mse_loss(trace, g, report.train_nodes);
    EpochStats stats{epoch, loss.loss, std::nullopt};
    if (n_val > 0) stats.val_mse = mse(trace.output(), g, report.val_nodes);
    if (!std::isfinite(loss.loss) || (stats.val_mse && !std::isfinite(*stats.val_mse)))
      throw Error("training diverged at epoch " + std::to_string(epoch) + ": non-finite loss");
    report.epochs.push_back(stats);

    if (stats.val_mse) {
      if (*stats.val_mse < best_val) {
        best_val = *stats.val_mse;
        best = model;
        report.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        report.early_stopped = true;
        break;
      }
    }

    const auto grads = backward(g.adjacency, model, trace, loss.grad_out);
    if (cfg.optimizer == OptimizerKind::adam) {
      adam.step(model, grads);
    } else {
      for (std::size_t t = 0; t < model.layers.size(); ++t) {
        model.layers[t].weight -= cfg.learning_rate * grads.layers[t].weight;
        model.layers[t].bias -= cfg.learning_rate * grads.layers[t].bias;
      }
    }
  }

  if (n_val > 0) {
    result.model = std::move(best);
  } else {
    result.model = std::move(model);
    report.best_epoch = static_cast<int>(report.epochs.size());
  }
  if (!result.model.layers.front().weight.allFinite())
    throw Error("training diverged: non-finite parameters after the final epoch");
  return result;
}

void write_train_report(const TrainReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write training report " + path.string());
  for (const auto& e : report.epochs) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["train_mse"] = e.train_mse;
    j["val_mse"] = e.val_mse ? nlohmann::ordered_json(*e.val_mse) : nlohmann::ordered_json(nullptr);
    j["best"] = e.epoch == report.best_epoch;
    out << j.dump() << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace kgimpute
