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

#include "kgimpute/gcn.h"

#include <fstream>

#include "binary_io.h"

namespace kgimpute {

namespace {
constexpr char kModelMagic[8] = {'K', 'G', 'I', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kModelVersion = 1;
}  // namespace

void save_model(const GcnModeld& model, const std::filesystem::path& path) {
  model.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  detail::BinaryWriter w(out);
  w.put_bytes(kModelMagic, sizeof(kModelMagic));
  w.put<std::uint32_t>(kModelVersion);
  w.put<std::uint64_t>(model.seed);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.num_layers()));
  for (int d : model.dims()) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  for (const auto& l : model.layers) {
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) w.put<double>(l.weight(i, j));
    w.put_matrix(l.bias);
  }
  if (!out) throw Error("write failed for " + path.string());
}

GcnModeld load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path.string());
  detail::BinaryReader r(in, path.string());
  char magic[sizeof(kModelMagic)];
  r.get_bytes(magic, sizeof(magic));
  if (!std::equal(magic, magic + sizeof(magic), kModelMagic)) throw Error(path.string() + ": not a model file");
  const auto version = r.get<std::uint32_t>();
  if (version != kModelVersion)
    throw Error(path.string() + ": unsupported model version " + std::to_string(version));
  GcnModeld model;
  model.seed = r.get<std::uint64_t>();
  const auto T = r.get<std::uint32_t>();
  if (T == 0 || T > 1024) throw Error(path.string() + ": corrupt layer count");
  std::vector<Eigen::Index> dims(T + 1);
  for (auto& d : dims) {
    d = r.get<std::uint32_t>();
    if (d == 0 || d > (1 << 16)) throw Error(path.string() + ": corrupt layer dimension");
  }
  for (std::uint32_t t = 0; t < T; ++t) {
    GcnLayer<double> l{Matrix(dims[t + 1], dims[t]), Vector()};
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) l.weight(i, j) = r.get<double>();
    l.bias = r.get_matrix(dims[t + 1], 1);
    model.layers.push_back(std::move(l));
  }
  r.expect_end();
  model.validate();
  return model;
}

}  // namespace kgimpute
