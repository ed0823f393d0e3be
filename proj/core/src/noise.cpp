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

#include "simgap/noise.hpp"

#include <cmath>

namespace simgap {

namespace {

uint64_t mix(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

double GradientNoise1D::grad(int64_t i) const {
  uint64_t h = mix(seed_ ^ mix(static_cast<uint64_t>(i)));
  // top 53 bits to a uniform in [-1, 1)
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

double GradientNoise1D::sample(double x) const {
  double fl = std::floor(x);
  int64_t i = static_cast<int64_t>(fl);
  double t = x - fl;
  double g0 = grad(i);
  double g1 = grad(i + 1);
  double u = t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
  // each term is gradient times offset to its lattice point; the blend peaks
  // at 0.5 for opposing unit gradients, so scale by 2 to fill [-1, 1]
  return 2.0 * ((1.0 - u) * g0 * t + u * g1 * (t - 1.0));
}

double OrnsteinUhlenbeck::step() {
  value_ += theta_ * (mu_ - value_) * dt_ + sigma_ * std::sqrt(dt_) * rng_.normal();
  return value_;
}

}  // namespace simgap
