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
#include <random>
#include <string>
#include <string_view>

namespace simgap {

/// Seeded random stream. The engine is std::mt19937_64 (fully specified by
/// the standard); the uniform/normal transforms are written out explicitly
/// here so that sequences are identical across standard library
/// implementations. State round-trips through a string for checkpointing.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n), n > 0. Rejection sampling on the raw stream.
  uint64_t uniform_int(uint64_t n);

  /// Standard normal via the polar (Marsaglia) method; pairs are cached.
  double normal();

  std::string state() const;
  void set_state(const std::string& s);

 private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

/// Deterministic per-component seed derivation: every stochastic part of the
/// system draws from a stream seeded by (masterSeed, its own name).
uint64_t derive_seed(uint64_t master, std::string_view component);

}  // namespace simgap
