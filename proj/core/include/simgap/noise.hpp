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

#include "simgap/rng.hpp"

namespace simgap {

/// 1-D gradient noise on the integer lattice with quintic blending.
/// Values lie in [-1, 1], vanish at integers, and are C1 everywhere. The
/// lattice gradients come from a stateless hash of (seed, index), so the
/// domain is unbounded and evaluation order never matters.
class GradientNoise1D {
 public:
  explicit GradientNoise1D(uint64_t seed) : seed_(seed) {}
  double sample(double x) const;

 private:
  double grad(int64_t i) const;
  uint64_t seed_;
};

/// Euler-Maruyama discretization of a mean-reverting diffusion:
///   x += theta * (mu - x) * dt + sigma * sqrt(dt) * N(0,1).
/// Stationary variance of the discrete chain is sigma^2 / (2 theta - theta^2 dt).
class OrnsteinUhlenbeck {
 public:
  OrnsteinUhlenbeck(double theta, double sigma, double dt, uint64_t seed, double mu = 0.0)
      : theta_(theta), sigma_(sigma), dt_(dt), mu_(mu), rng_(seed), value_(mu) {}

  double step();
  double value() const { return value_; }
  void reset(double v = 0.0) { value_ = v; }

 private:
  double theta_, sigma_, dt_, mu_;
  Rng rng_;
  double value_;
};

}  // namespace simgap
