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

#include "simgap/optim.hpp"

#include <cmath>

namespace simgap {

template <typename T>
void AdamT<T>::step(ParamStoreT<T>& params) {
  t_ += 1;
  const T c1 = T(1) - std::pow(beta1_, static_cast<T>(t_));
  const T c2 = T(1) - std::pow(beta2_, static_cast<T>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    ParamT<T>& p = params.at(i);
    auto it = slots_.find(p.name);
    if (it == slots_.end()) {
      Slot s;
      s.m = TensorT<T>::zeros(p.value.shape);
      s.v = TensorT<T>::zeros(p.value.shape);
      it = slots_.emplace(p.name, std::move(s)).first;
    }
    Slot& s = it->second;
    for (size_t j = 0; j < p.value.data.size(); ++j) {
      T g = p.grad.data[j];
      s.m.data[j] = beta1_ * s.m.data[j] + (T(1) - beta1_) * g;
      s.v.data[j] = beta2_ * s.v.data[j] + (T(1) - beta2_) * g * g;
      T mhat = s.m.data[j] / c1;
      T vhat = s.v.data[j] / c2;
      p.value.data[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      p.grad.data[j] = T(0);
    }
  }
}

template <typename T>
void SgdT<T>::step(ParamStoreT<T>& params) {
  for (size_t i = 0; i < params.size(); ++i) {
    ParamT<T>& p = params.at(i);
    for (size_t j = 0; j < p.value.data.size(); ++j) {
      p.value.data[j] -= lr_ * p.grad.data[j];
      p.grad.data[j] = T(0);
    }
  }
}

template class AdamT<float>;
template class AdamT<double>;
template class SgdT<float>;
template class SgdT<double>;

}  // namespace simgap
