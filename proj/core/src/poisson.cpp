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

#include "simgap/poisson.hpp"

#include <cmath>
#include <stdexcept>

namespace simgap {

std::vector<Vec2> poisson_disk(Vec2 lo, Vec2 hi, double radius, Rng& rng, int attempts) {
  if (radius <= 0.0 || hi.x <= lo.x || hi.y <= lo.y)
    throw std::invalid_argument("poisson_disk: bad domain or radius");

  const double cell = radius / std::sqrt(2.0);
  const int gw = static_cast<int>(std::ceil((hi.x - lo.x) / cell));
  const int gh = static_cast<int>(std::ceil((hi.y - lo.y) / cell));
  std::vector<int> grid(static_cast<size_t>(gw) * gh, -1);

  std::vector<Vec2> points;
  std::vector<int> active;

  auto cell_of = [&](Vec2 p, int* cx, int* cy) {
    *cx = std::min(gw - 1, static_cast<int>((p.x - lo.x) / cell));
    *cy = std::min(gh - 1, static_cast<int>((p.y - lo.y) / cell));
  };
  auto fits = [&](Vec2 p) {
    if (p.x < lo.x || p.x >= hi.x || p.y < lo.y || p.y >= hi.y) return false;
    int cx, cy;
    cell_of(p, &cx, &cy);
    for (int y = std::max(0, cy - 2); y <= std::min(gh - 1, cy + 2); ++y)
      for (int x = std::max(0, cx - 2); x <= std::min(gw - 1, cx + 2); ++x) {
        int idx = grid[static_cast<size_t>(y) * gw + x];
        if (idx >= 0 && norm(points[static_cast<size_t>(idx)] - p) < radius) return false;
      }
    return true;
  };
  auto insert = [&](Vec2 p) {
    int cx, cy;
    cell_of(p, &cx, &cy);
    grid[static_cast<size_t>(cy) * gw + cx] = static_cast<int>(points.size());
    active.push_back(static_cast<int>(points.size()));
    points.push_back(p);
  };

  insert({lo.x + rng.uniform() * (hi.x - lo.x), lo.y + rng.uniform() * (hi.y - lo.y)});

  while (!active.empty()) {
    uint64_t pick = rng.uniform_int(active.size());
    Vec2 base = points[static_cast<size_t>(active[pick])];
    bool found = false;
    for (int a = 0; a < attempts; ++a) {
      double ang = rng.uniform() * 2.0 * M_PI;
      double r = radius * std::sqrt(1.0 + 3.0 * rng.uniform());  // area-uniform in [r, 2r]
      Vec2 cand = base + r * Vec2{std::cos(ang), std::sin(ang)};
      if (fits(cand)) {
        insert(cand);
        found = true;
        break;
      }
    }
    if (!found) {
      active[pick] = active.back();
      active.pop_back();
    }
  }
  return points;
}

}  // namespace simgap
