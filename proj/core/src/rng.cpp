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

#include "simgap/rng.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace simgap {

uint64_t Rng::uniform_int(uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be > 0");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = eng_();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  cached_ = v * m;
  have_cached_ = true;
  return u * m;
}

std::string Rng::state() const {
  std::ostringstream os;
  os << eng_;
  os << " " << (have_cached_ ? 1 : 0);
  // hexfloat keeps the cached normal bit-exact through the round trip
  os << " " << std::hexfloat << cached_;
  return os.str();
}

void Rng::set_state(const std::string& s) {
  std::istringstream is(s);
  is >> eng_;
  int flag = 0;
  is >> flag;
  std::string hex;
  is >> hex;
  if (!is) throw std::runtime_error("Rng::set_state: malformed state string");
  have_cached_ = flag != 0;
  cached_ = std::strtod(hex.c_str(), nullptr);
}

static uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t master, std::string_view component) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the component name
  for (unsigned char c : component) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(master ^ h));
}

}  // namespace simgap
