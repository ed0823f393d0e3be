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

#include <map>
#include <string>

#include "simgap/tape.hpp"

namespace simgap {

/// Adam with bias correction. step() applies the accumulated gradients of
/// every param in the store and clears them.
template <typename T>
class AdamT {
 public:
  struct Slot {
    TensorT<T> m;
    TensorT<T> v;
  };

  AdamT(T lr, T beta1, T beta2, T eps = static_cast<T>(1e-8))
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamStoreT<T>& params);

  int64_t step_count() const { return t_; }
  void set_step_count(int64_t t) { t_ = t; }
  std::map<std::string, Slot>& slots() { return slots_; }
  const std::map<std::string, Slot>& slots() const { return slots_; }

 private:
  T lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::map<std::string, Slot> slots_;
};

/// Plain SGD, no momentum. step() applies and clears gradients.
template <typename T>
class SgdT {
 public:
  explicit SgdT(T lr) : lr_(lr) {}
  void step(ParamStoreT<T>& params);

 private:
  T lr_;
};

using Adam = AdamT<float>;
using Sgd = SgdT<float>;

}  // namespace simgap
