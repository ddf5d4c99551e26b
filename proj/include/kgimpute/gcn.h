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
#include <random>
#include <vector>

#include "kgimpute/graph.h"

namespace kgimpute {

// Graph convolution with a weighted closed neighborhood:
//
//   agg_v   = (h_v + sum_{u in N(v)} s_vu h_u) / C_v,   C_v = 1 + sum_u s_vu
//   z_v^t   = W^t agg_v^{t-1} + b^t
//   h_v^t   = ReLU(z_v^t) for t < T,  h_v^T = z_v^T
//
// Per-node quantities are stored as columns: an activation matrix is d x n.

template <typename Scalar>
struct GcnLayer {
  MatrixX<Scalar> weight;  // d_out x d_in
  VectorX<Scalar> bias;    // d_out
};

template <typename Scalar>
struct GcnModel {
  std::vector<GcnLayer<Scalar>> layers;
  std::uint64_t seed = 0;

  std::size_t num_layers() const { return layers.size(); }

  /// [d_0, ..., d_T]
  std::vector<int> dims() const {
    std::vector<int> d;
    if (layers.empty()) return d;
    d.push_back(static_cast<int>(layers.front().weight.cols()));
    for (const auto& l : layers) d.push_back(static_cast<int>(l.weight.rows()));
    return d;
  }

  void validate() const {
    if (layers.empty()) throw Error("model needs at least one layer");
    for (std::size_t t = 0; t < layers.size(); ++t) {
      const auto& l = layers[t];
      if (l.bias.size() != l.weight.rows()) throw Error("bias length does not match layer output");
      if (t > 0 && l.weight.cols() != layers[t - 1].weight.rows())
        throw Error("layer " + std::to_string(t + 1) + " input does not match previous output");
      if (!l.weight.allFinite() || !l.bias.allFinite()) throw Error("non-finite model parameter");
    }
  }

  template <typename Other>
  GcnModel<Other> cast() const {
    GcnModel<Other> out;
    out.seed = seed;
    for (const auto& l : layers)
      out.layers.push_back({l.weight.template cast<Other>(), l.bias.template cast<Other>()});
    return out;
  }
};

using GcnModeld = GcnModel<double>;

/// Uniform(-a, a) weights with a = sqrt(6 / (d_in + d_out)), zero biases.
template <typename Scalar>
GcnModel<Scalar> glorot_model(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw Error("model needs at least one layer");
  for (int d : dims)
    if (d <= 0) throw Error("layer dimensions must be positive");
  std::mt19937_64 rng(seed);
  GcnModel<Scalar> model;
  model.seed = seed;
  for (std::size_t t = 1; t < dims.size(); ++t) {
    const double a = std::sqrt(6.0 / (dims[t - 1] + dims[t]));
    std::uniform_real_distribution<double> dist(-a, a);
    GcnLayer<Scalar> layer{MatrixX<Scalar>(dims[t], dims[t - 1]), VectorX<Scalar>::Zero(dims[t])};
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
        layer.weight(i, j) = static_cast<Scalar>(dist(rng));
    model.layers.push_back(std::move(layer));
  }
  return model;
}

/// Aggregate for a single node.
template <typename Derived>
VectorX<typename Derived::Scalar> aggregate(const WeightedAdjacency& adj,
                                            const Eigen::MatrixBase<Derived>& h_prev,
                                            std::size_t v) {
  using Scalar = typename Derived::Scalar;
  const auto col = static_cast<Eigen::Index>(v);
  // h_v + sum_u s_vu (h_u - h_v) / C; exact for constant inputs.
  VectorX<Scalar> acc = VectorX<Scalar>::Zero(h_prev.rows());
  Scalar c(1);
  auto nb = adj.neighbors(v);
  auto ws = adj.weights(v);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const Scalar s = static_cast<Scalar>(ws[k]);
    acc += s * (h_prev.col(static_cast<Eigen::Index>(nb[k])) - h_prev.col(col));
    c += s;
  }
  return h_prev.col(col) + acc / c;
}

/// Aggregates every node; column v of the result is aggregate(adj, h_prev, v).
template <typename Derived>
MatrixX<typename Derived::Scalar> aggregate_all(const WeightedAdjacency& adj,
                                                const Eigen::MatrixBase<Derived>& h_prev) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> out(h_prev.rows(), h_prev.cols());
  for (std::size_t v = 0; v < adj.num_nodes(); ++v) out.col(static_cast<Eigen::Index>(v)) = aggregate(adj, h_prev, v);
  return out;
}

/// Adjoint of aggregate_all: maps d(loss)/d(aggregate) to d(loss)/d(h_prev).
template <typename Derived>
MatrixX<typename Derived::Scalar> aggregate_adjoint(const WeightedAdjacency& adj,
                                                    const Eigen::MatrixBase<Derived>& grad_agg) {
  using Scalar = typename Derived::Scalar;
  const std::size_t n = adj.num_nodes();
  VectorX<Scalar> inv_c(static_cast<Eigen::Index>(n));
  for (std::size_t v = 0; v < n; ++v) inv_c[static_cast<Eigen::Index>(v)] = Scalar(1) / static_cast<Scalar>(adj.normalizer(v));

  MatrixX<Scalar> out(grad_agg.rows(), grad_agg.cols());
  for (std::size_t u = 0; u < n; ++u) {
    const auto cu = static_cast<Eigen::Index>(u);
    // h_u feeds its own aggregate with weight 1/C_u and each neighbor v's with s_uv/C_v
    VectorX<Scalar> acc = inv_c[cu] * grad_agg.col(cu);
    auto nb = adj.neighbors(u);
    auto ws = adj.weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const auto cv = static_cast<Eigen::Index>(nb[k]);
      acc += (static_cast<Scalar>(ws[k]) * inv_c[cv]) * grad_agg.col(cv);
    }
    out.col(cu) = acc;
  }
  return out;
}

template <typename Scalar>
struct ForwardTrace {
  std::vector<MatrixX<Scalar>> activations;     // h^0 .. h^T
  std::vector<MatrixX<Scalar>> aggregates;      // input to layer t, t = 1..T
  std::vector<MatrixX<Scalar>> preactivations;  // z^1 .. z^T

  const MatrixX<Scalar>& output() const { return activations.back(); }
};

template <typename Scalar>
ForwardTrace<Scalar> forward(const WeightedAdjacency& adj, const MatrixX<Scalar>& features,
                             const GcnModel<Scalar>& model) {
  model.validate();
  if (features.cols() != static_cast<Eigen::Index>(adj.num_nodes()))
    throw Error("feature matrix has " + std::to_string(features.cols()) + " columns for " +
                std::to_string(adj.num_nodes()) + " nodes");
  if (features.rows() != model.layers.front().weight.cols())
    throw Error("feature dim " + std::to_string(features.rows()) + " does not match model input dim " +
                std::to_string(model.layers.front().weight.cols()));

  ForwardTrace<Scalar> trace;
  trace.activations.push_back(features);
  const std::size_t T = model.num_layers();
  for (std::size_t t = 0; t < T; ++t) {
    const auto& layer = model.layers[t];
    trace.aggregates.push_back(aggregate_all(adj, trace.activations.back()));
    MatrixX<Scalar> z = layer.weight * trace.aggregates.back();
    z.colwise() += layer.bias;
    trace.activations.push_back(t + 1 < T ? MatrixX<Scalar>(z.cwiseMax(Scalar(0))) : z);
    trace.preactivations.push_back(std::move(z));
  }
  return trace;
}

inline ForwardTrace<double> forward(const KnowledgeGraph& g, const GcnModeld& model) {
  return forward(g.adjacency, g.features, model);
}

template <typename Scalar>
struct GcnGradients {
  std::vector<GcnLayer<Scalar>> layers;  // d/dW^t, d/db^t
  MatrixX<Scalar> features;              // d/dh^0
};

/// Backpropagates per-node output gradients (d x n) through the trace.
/// ReLU'(0) is taken as 0.
template <typename Scalar>
GcnGradients<Scalar> backward(const WeightedAdjacency& adj, const GcnModel<Scalar>& model,
                              const ForwardTrace<Scalar>& trace, const MatrixX<Scalar>& grad_out) {
  const std::size_t T = model.num_layers();
  if (trace.preactivations.size() != T || trace.aggregates.size() != T)
    throw Error("trace does not match model depth");
  if (grad_out.rows() != trace.output().rows() || grad_out.cols() != trace.output().cols())
    throw Error("output gradient shape does not match model output");

  GcnGradients<Scalar> grads;
  grads.layers.resize(T);
  MatrixX<Scalar> grad_h = grad_out;
  for (std::size_t i = T; i-- > 0;) {
    MatrixX<Scalar> grad_z =
        i + 1 == T ? grad_h
                   : MatrixX<Scalar>((trace.preactivations[i].array() > Scalar(0)).select(grad_h, Scalar(0)));
    grads.layers[i].weight = grad_z * trace.aggregates[i].transpose();
    grads.layers[i].bias = grad_z.rowwise().sum();
    const MatrixX<Scalar> grad_agg = model.layers[i].weight.transpose() * grad_z;
    grad_h = aggregate_adjoint(adj, grad_agg);
  }
  grads.features = std::move(grad_h);
  return grads;
}

/// Dense row-normalized adjacency with unit self loops: A[v][u] = s_vu / C_v,
/// A[v][v] = 1 / C_v. Test-scale only.
inline Matrix dense_normalized_adjacency(const WeightedAdjacency& adj) {
  const auto n = static_cast<Eigen::Index>(adj.num_nodes());
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index v = 0; v < n; ++v) {
    const double c = adj.normalizer(static_cast<std::size_t>(v));
    a(v, v) = 1.0 / c;
    auto nb = adj.neighbors(static_cast<std::size_t>(v));
    auto ws = adj.weights(static_cast<std::size_t>(v));
    for (std::size_t k = 0; k < nb.size(); ++k) a(v, nb[k]) = ws[k] / c;
  }
  return a;
}

/// Reference forward pass through an explicit dense adjacency matrix.
inline Matrix forward_dense_oracle(const WeightedAdjacency& adj, const Matrix& features,
                                   const GcnModeld& model) {
  if (adj.num_nodes() > 500) throw Error("dense oracle is limited to 500 nodes");
  const Matrix a = dense_normalized_adjacency(adj);
  Matrix h = features;
  for (std::size_t t = 0; t < model.num_layers(); ++t) {
    Matrix z = model.layers[t].weight * (h * a.transpose());
    z.colwise() += model.layers[t].bias;
    h = t + 1 < model.num_layers() ? Matrix(z.cwiseMax(0.0)) : z;
  }
  return h;
}

void save_model(const GcnModeld& model, const std::filesystem::path& path);
GcnModeld load_model(const std::filesystem::path& path);

}  // namespace kgimpute
