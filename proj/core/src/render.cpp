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

#include "simgap/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace simgap {

namespace {

uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Lattice value noise in [0, 1], anchored to world coordinates so textures
/// stay put as the camera moves.
struct ValueNoise2D {
  uint64_t seed;
  double lattice(int64_t ix, int64_t iy) const {
    uint64_t h = mix64(seed ^ mix64(static_cast<uint64_t>(ix) * 0x9e3779b97f4a7c15ull ^
                                    mix64(static_cast<uint64_t>(iy))));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  }
  double sample(double x, double y) const {
    double fx = std::floor(x), fy = std::floor(y);
    int64_t ix = static_cast<int64_t>(fx), iy = static_cast<int64_t>(fy);
    double tx = x - fx, ty = y - fy;
    double ux = tx * tx * (3.0 - 2.0 * tx);
    double uy = ty * ty * (3.0 - 2.0 * ty);
    double a = lattice(ix, iy), b = lattice(ix + 1, iy);
    double c = lattice(ix, iy + 1), d = lattice(ix + 1, iy + 1);
    return (a * (1 - ux) + b * ux) * (1 - uy) + (c * (1 - ux) + d * ux) * uy;
  }
  double fbm(double x, double y) const {
    return 0.6 * sample(x, y) + 0.3 * sample(2.0 * x + 13.7, 2.0 * y - 7.1) +
           0.1 * sample(4.0 * x - 3.3, 4.0 * y + 21.9);
  }
};

struct Rgb {
  double r, g, b;
};

Rgb scale_rgb(Rgb c, double s) { return {c.r * s, c.g * s, c.b * s}; }
Rgb lerp_rgb(Rgb a, Rgb b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

const Rgb kSimSky{135, 206, 235};
const Rgb kSimGrass{86, 168, 74};
const Rgb kSimRoad{128, 128, 128};
const Rgb kSimEdge{232, 232, 232};
const Rgb kSimFoliage[4] = {{34, 102, 51}, {46, 120, 60}, {28, 90, 44}, {52, 130, 70}};

const Rgb kRealSkyTop{108, 158, 208};
const Rgb kRealSkyHorizon{196, 206, 214};
const Rgb kRealGrass{92, 140, 66};
const Rgb kRealRoad{96, 93, 90};
const Rgb kRealTrack{114, 111, 107};
const Rgb kRealEdgeDirt{143, 126, 96};
const Rgb kRealFoliage[4] = {{40, 96, 52}, {56, 112, 58}, {34, 84, 46}, {62, 122, 68}};

/// Uniform grid over foliage for near-constant-time point queries.
struct FoliageIndex {
  double cell = 8.0;
  double minx = 0, miny = 0;
  int gw = 0, gh = 0;
  std::vector<std::vector<int>> buckets;

  explicit FoliageIndex(const std::vector<Foliage>& fol) {
    if (fol.empty()) return;
    double maxx = -1e300, maxy = -1e300;
    minx = 1e300;
    miny = 1e300;
    for (const Foliage& f : fol) {
      minx = std::min(minx, f.pos.x);
      miny = std::min(miny, f.pos.y);
      maxx = std::max(maxx, f.pos.x);
      maxy = std::max(maxy, f.pos.y);
    }
    gw = std::max(1, static_cast<int>((maxx - minx) / cell) + 1);
    gh = std::max(1, static_cast<int>((maxy - miny) / cell) + 1);
    buckets.resize(static_cast<size_t>(gw) * gh);
    for (size_t i = 0; i < fol.size(); ++i) {
      int cx = std::clamp(static_cast<int>((fol[i].pos.x - minx) / cell), 0, gw - 1);
      int cy = std::clamp(static_cast<int>((fol[i].pos.y - miny) / cell), 0, gh - 1);
      buckets[static_cast<size_t>(cy) * gw + cx].push_back(static_cast<int>(i));
    }
  }

  /// Index of a foliage disc covering p, or -1.
  int query(const std::vector<Foliage>& fol, Vec2 p) const {
    if (buckets.empty()) return -1;
    int cx = static_cast<int>((p.x - minx) / cell);
    int cy = static_cast<int>((p.y - miny) / cell);
    for (int y = cy - 1; y <= cy + 1; ++y)
      for (int x = cx - 1; x <= cx + 1; ++x) {
        if (x < 0 || x >= gw || y < 0 || y >= gh) continue;
        for (int i : buckets[static_cast<size_t>(y) * gw + x])
          if (norm(fol[static_cast<size_t>(i)].pos - p) <= fol[static_cast<size_t>(i)].radius)
            return i;
      }
    return -1;
  }
};

}  // namespace

const char* render_style_name(RenderStyle s) {
  return s == RenderStyle::kSim ? "sim" : "targetproxy";
}

RenderStyle render_style_from_name(const std::string& name) {
  if (name == "sim") return RenderStyle::kSim;
  if (name == "targetproxy") return RenderStyle::kTargetProxy;
  throw std::invalid_argument("unknown render style: " + name);
}

Image render_view(const World& world, const Camera& cam, Vec2 vehicle_pos, double vehicle_heading,
                  RenderStyle style, Rng* rng) {
  const bool textured = style == RenderStyle::kTargetProxy;
  if (textured && !rng) throw std::invalid_argument("render_view: TargetProxy needs an rng");

  const Path& road = world.centerline;
  const double halfw = world.lane_width / 2.0;
  const double s0 = road.project(vehicle_pos);
  const Vec2 fwd{std::cos(vehicle_heading), std::sin(vehicle_heading)};
  FoliageIndex index(world.foliage);
  ValueNoise2D grass_tex{derive_seed(world.seed, "tex:grass")};
  ValueNoise2D road_tex{derive_seed(world.seed, "tex:road")};
  ValueNoise2D canopy_tex{derive_seed(world.seed, "tex:canopy")};

  const double gain = textured ? rng->uniform(0.92, 1.08) : 1.0;

  Image img(cam.width, cam.height);
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      Rgb color{};
      Vec2 g;
      if (!cam.ground_of_pixel(u, v, vehicle_pos, vehicle_heading, &g)) {
        if (textured) {
          double t = cam.height > 1 ? static_cast<double>(v) / (cam.height - 1) : 0.0;
          color = lerp_rgb(kRealSkyTop, kRealSkyHorizon, std::min(1.0, 2.2 * t));
        } else {
          color = kSimSky;
        }
      } else {
        double ahead = dot(g - vehicle_pos, fwd);
        double hint = std::clamp(s0 + ahead, 0.0, road.length());
        double window = 10.0 + 0.35 * std::abs(ahead);
        double s = road.project(g, hint, window);
        double d = norm(road.position(s) - g);
        double dist = norm(g - vehicle_pos);

        int fi = index.query(world.foliage, g);
        if (d <= halfw) {
          if (textured) {
            double n = road_tex.fbm(g.x * 0.7, g.y * 0.7);
            Rgb base = lerp_rgb(kRealRoad, kRealTrack, 0.5 + 0.5 * std::cos(d / halfw * 3.4));
            color = scale_rgb(base, 0.88 + 0.24 * n);
          } else {
            color = kSimRoad;
          }
        } else if (std::abs(d - halfw) < 0.15) {
          if (textured) {
            double n = road_tex.fbm(g.x * 1.3 + 5.0, g.y * 1.3);
            color = scale_rgb(kRealEdgeDirt, 0.85 + 0.3 * n);
          } else {
            color = kSimEdge;
          }
        } else if (fi >= 0) {
          const Foliage& f = world.foliage[static_cast<size_t>(fi)];
          if (textured) {
            double n = canopy_tex.fbm(g.x * 1.1, g.y * 1.1);
            color = scale_rgb(kRealFoliage[f.kind & 3], 0.8 + 0.4 * n);
          } else {
            color = kSimFoliage[f.kind & 3];
          }
        } else {
          if (textured) {
            double n = grass_tex.fbm(g.x * 0.5, g.y * 0.5);
            double patch = grass_tex.sample(g.x * 0.08 + 40.0, g.y * 0.08);
            Rgb base = scale_rgb(kRealGrass, 0.82 + 0.3 * n + 0.12 * patch);
            color = base;
          } else {
            color = kSimGrass;
          }
        }
        if (textured) {
          // distance haze toward the horizon tone
          double haze = dist / (dist + 90.0);
          color = lerp_rgb(color, kRealSkyHorizon, 0.55 * haze);
        }
      }

      if (textured) {
        double du = (u - cam.cx) / (cam.width / 2.0);
        double dv = (v - cam.cy) / (cam.height / 2.0);
        double vig = 1.0 - 0.30 * (du * du + dv * dv) * 0.5;
        color = scale_rgb(color, vig * gain);
      }

      uint8_t* px = img.px(u, v);
      for (int c = 0; c < 3; ++c) {
        double val = c == 0 ? color.r : (c == 1 ? color.g : color.b);
        if (textured) val += 6.0 * rng->normal();
        px[c] = static_cast<uint8_t>(std::lround(std::clamp(val, 0.0, 255.0)));
      }
    }
  }
  return img;
}

}  // namespace simgap
