// Copyright 2026 The simgap Authors
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
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "simgap/rng.hpp"

namespace simgap {

/// Dense row-major tensor. Image batches use the (N, C, H, W) convention.
/// Training runs on float; gradient-check oracles instantiate double.
template <typename T>
struct TensorT {
  std::vector<int> shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<int> s) : shape(std::move(s)) {
    data.assign(static_cast<size_t>(count(shape)), T(0));
  }
  TensorT(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
    if (static_cast<int64_t>(data.size()) != count(shape))
      throw std::invalid_argument("tensor: data length does not match shape");
  }

  static int64_t count(const std::vector<int>& s) {
    int64_t n = 1;
    for (int e : s) {
      if (e <= 0) throw std::invalid_argument("tensor: nonpositive extent");
      n *= e;
    }
    return n;
  }

  static TensorT zeros(std::vector<int> s) { return TensorT(std::move(s)); }
  static TensorT full(std::vector<int> s, T v) {
    TensorT t(std::move(s));
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }
  static TensorT scalar(T v) { return TensorT({1}, {v}); }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int ndim() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape.at(static_cast<size_t>(i)); }

  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  T& at4(int n, int c, int h, int w) {
    return data[((static_cast<size_t>(n) * shape[1] + c) * shape[2] + h) * shape[3] + w];
  }
  T at4(int n, int c, int h, int w) const {
    return data[((static_cast<size_t>(n) * shape[1] + c) * shape[2] + h) * shape[3] + w];
  }

  bool same_shape(const TensorT& o) const { return shape == o.shape; }
};

using Tensor = TensorT<float>;
using TensorD = TensorT<double>;

/// Elementwise i.i.d. N(0,1) draws from the given stream.
template <typename T>
TensorT<T> gaussian_noise(std::vector<int> shape, Rng& rng) {
  TensorT<T> t(std::move(shape));
  for (auto& v : t.data) v = static_cast<T>(rng.normal());
  return t;
}

/// Uniform draws in [lo, hi).
template <typename T>
TensorT<T> uniform_tensor(std::vector<int> shape, Rng& rng, double lo, double hi) {
  TensorT<T> t(std::move(shape));
  for (auto& v : t.data) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

bool all_finite(const TensorT<float>& t);
bool all_finite(const TensorT<double>& t);

}  // namespace simgap
