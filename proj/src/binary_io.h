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

// Little-endian binary container helpers shared by graph and model files.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "kgimpute/common.h"

namespace kgimpute::detail {

static_assert(std::endian::native == std::endian::little, "binary files assume little-endian hosts");

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T x) {
    out_.write(reinterpret_cast<const char*>(&x), sizeof(T));
  }
  void put_bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), n); }
  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    put_bytes(s.data(), s.size());
  }
  template <typename Derived>
  void put_matrix(const Eigen::DenseBase<Derived>& m) {
    // column-major, matching Eigen storage
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) put<double>(static_cast<double>(m(i, j)));
  }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T x;
    get_bytes(&x, sizeof(T));
    return x;
  }
  void get_bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw Error(path_ + ": truncated file");
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    if (n > (1u << 24)) throw Error(path_ + ": corrupt string length");
    std::string s(n, '\0');
    get_bytes(s.data(), n);
    return s;
  }
  Matrix get_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    if (m.size() > 0) get_bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    return m;
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) throw Error(path_ + ": trailing bytes");
  }
  const std::string& path() const { return path_; }

 private:
  std::istream& in_;
  std::string path_;
};

}  // namespace kgimpute::detail
