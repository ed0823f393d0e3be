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

#include <string>

#include "simgap/geometry.hpp"

namespace simgap {

struct Foliage {
  Vec2 pos;
  double radius = 1.0;
  int kind = 0;  // selects one of a few canopy color variants
};

/// One procedural driving world: a single-lane rural road plus scattered
/// foliage. Everything downstream (rendering, the expert, evaluation) reads
/// it, so the JSON form stores exact control points for bit-stable reloads.
struct World {
  uint64_t seed = 0;
  CenterlineParams params;
  double lane_width = 3.5;
  Path centerline;
  std::vector<Foliage> foliage;
};

/// Builds a world from a seed. Self-intersecting centerlines (corridor folding
/// within clearance) are rejected and resampled from a derived seed, bounded
/// attempts. Foliage is blue-noise scattered outside the lane corridor.
World generate_world(const CenterlineParams& params, double lane_width, uint64_t seed);

/// worldspec/1 JSON:
/// { "format": "worldspec/1", "seed": u64, "laneWidth": m,
///   "params": {"length","step","kappaGain","frequency","ds"},
///   "segments": [[x0,y0, x1,y1, x2,y2, x3,y3], ...],
///   "foliage": [[x, y, radius, kind], ...] }
void save_world(const World& world, const std::string& path);
World load_world(const std::string& path);

}  // namespace simgap
