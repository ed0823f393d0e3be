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

#include "simgap/geometry.hpp"
#include "simgap/rng.hpp"

namespace simgap {

/// Bridson dart throwing over [lo, hi]: returned points are pairwise at least
/// `radius` apart and the rectangle has no uncovered disk of radius 2*radius.
/// Deterministic for a given rng state.
std::vector<Vec2> poisson_disk(Vec2 lo, Vec2 hi, double radius, Rng& rng, int attempts = 30);

}  // namespace simgap
