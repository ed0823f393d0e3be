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

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "simgap/rng.hpp"
#include "simgap/tensor.hpp"

namespace simgap {

/// Named trainable tensor. Gradients accumulate across backward calls until
/// the owning optimizer consumes and clears them.
template <typename T>
struct ParamT {
  std::string name;
  TensorT<T> value;
  TensorT<T> grad;
};

template <typename T>
class ParamStoreT {
 public:
  /// Uniform init with variance 1/fan_in (bound sqrt(3/fan_in)).
  ParamT<T>& add(const std::string& name, std::vector<int> shape, int fan_in, Rng& rng);
  ParamT<T>& add_zeros(const std::string& name, std::vector<int> shape);
  ParamT<T>& get(const std::string& name);
  const ParamT<T>& get(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) != 0; }
  void zero_grads();
  size_t size() const { return params_.size(); }
  ParamT<T>& at(size_t i) { return *params_[i]; }
  const ParamT<T>& at(size_t i) const { return *params_[i]; }
  int64_t total_count() const;

 private:
  std::vector<std::unique_ptr<ParamT<T>>> params_;  // insertion order, stable for checkpoints
  std::map<std::string, size_t> index_;
};

/// Eager reverse-mode tape. Every op runs its forward immediately and records
/// a closure for the backward sweep. One backward() per tape; build a fresh
/// tape per training iteration.
///
/// Weight layouts: conv2d takes (F, C, KH, KW), tconv2d takes (C, F, KH, KW),
/// fc takes (M, K) acting on rows of an (N, K) input.
template <typename T>
class TapeT {
 public:
  using Var = int;

  Var constant(TensorT<T> v);
  Var param(ParamT<T>& p);

  Var conv2d(Var x, Var w, Var b, int stride, int pad);
  Var tconv2d(Var x, Var w, Var b, int stride, int pad);
  Var fc(Var x, Var w, Var b);
  Var instance_norm(Var x);
  Var relu(Var x);
  Var leaky_relu(Var x, T slope);
  Var tanh_(Var x);
  Var add(Var a, Var b);
  Var scale(Var x, T s);
  /// Appends two channels holding the column and row coordinate ramps in
  /// [-1, 1] so spatial position survives the translation equivariance of conv.
  Var coord_channels(Var x);
  Var global_avg_pool(Var x);  // (N,C,H,W) -> (N,C)
  Var avg_pool2(Var x);        // 2x2 window, stride 2
  Var add_noise(Var x, Rng& rng);
  Var detach(Var x);
  /// Identity forward; backward multiplies the incoming gradient by -lambda.
  Var grad_reverse(Var x, T lambda);

  Var l1_mean(Var a, Var b);       // mean |a - b|, scalar
  Var mse_const(Var x, T target);  // mean (x - target)^2, scalar
  Var wsum(const std::vector<std::pair<T, Var>>& terms);  // scalars only

  const TensorT<T>& val(Var v) const { return nodes_[static_cast<size_t>(v)].value; }
  T scalar(Var v) const;
  /// Accumulates d(root)/d(param) into each bound param's grad field.
  void backward(Var root);
  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    TensorT<T> value;
    TensorT<T> grad;
    bool has_grad = false;
    bool needs_grad = false;
    std::function<void(TapeT&)> back;  // empty for leaves and constants
  };

  Var push(Node n);
  TensorT<T>& grad_ref(Var v);  // lazy-allocates zeros
  bool needs(Var v) const { return nodes_[static_cast<size_t>(v)].needs_grad; }

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

using Tape = TapeT<float>;
using TapeD = TapeT<double>;
using ParamStore = ParamStoreT<float>;
using ParamStoreD = ParamStoreT<double>;

}  // namespace simgap
