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

#include "simgap/world.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "simgap/poisson.hpp"

namespace simgap {

namespace {

using nlohmann::json;

constexpr double kFoliageClearance = 2.0;  // metres beyond the lane edge kept clear
constexpr double kFoliageMargin = 30.0;    // scatter this far beyond the road bbox
constexpr double kFoliageSpacing = 5.0;
constexpr int kFoliageKinds = 4;
constexpr int kMaxAttempts = 32;

bool corridor_clear(const Path& path, double lane_width) {
  // separation floor well above a segment length so neighbouring samples
  // along the road never count as folds
  double clearance = path.min_self_distance(25.0);
  return clearance > 3.0 * lane_width;
}

}  // namespace

World generate_world(const CenterlineParams& params, double lane_width, uint64_t seed) {
  World w;
  w.seed = seed;
  w.params = params;
  w.lane_width = lane_width;

  bool built = false;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    uint64_t s = derive_seed(seed, "centerline:" + std::to_string(attempt));
    Path candidate = build_centerline(params, s);
    if (corridor_clear(candidate, lane_width)) {
      w.centerline = std::move(candidate);
      built = true;
      break;
    }
  }
  if (!built) throw std::runtime_error("generate_world: no non-folding road in attempt budget");

  // bounding box of the road plus margin
  double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300;
  for (double s = 0.0; s <= w.centerline.length(); s += 2.0) {
    Vec2 p = w.centerline.position(s);
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
    maxx = std::max(maxx, p.x);
    maxy = std::max(maxy, p.y);
  }
  Vec2 lo{minx - kFoliageMargin, miny - kFoliageMargin};
  Vec2 hi{maxx + kFoliageMargin, maxy + kFoliageMargin};

  Rng rng(derive_seed(seed, "foliage"));
  auto candidates = poisson_disk(lo, hi, kFoliageSpacing, rng);
  double keep_out = lane_width / 2.0 + kFoliageClearance;
  for (Vec2 p : candidates) {
    double s = w.centerline.project(p);
    if (norm(w.centerline.position(s) - p) < keep_out + 2.2) continue;
    Foliage f;
    f.pos = p;
    f.radius = rng.uniform(0.8, 2.2);
    f.kind = static_cast<int>(rng.uniform_int(kFoliageKinds));
    w.foliage.push_back(f);
  }
  return w;
}

void save_world(const World& world, const std::string& path) {
  json j;
  j["format"] = "worldspec/1";
  j["seed"] = world.seed;
  j["laneWidth"] = world.lane_width;
  j["params"] = {{"length", world.params.length},
                 {"step", world.params.step},
                 {"kappaGain", world.params.kappa_gain},
                 {"frequency", world.params.frequency},
                 {"ds", world.params.ds}};
  json segs = json::array();
  for (size_t i = 0; i < world.centerline.segment_count(); ++i) {
    const CubicBezier& b = world.centerline.segment(i);
    segs.push_back({b.p0.x, b.p0.y, b.p1.x, b.p1.y, b.p2.x, b.p2.y, b.p3.x, b.p3.y});
  }
  j["segments"] = std::move(segs);
  json fol = json::array();
  for (const Foliage& f : world.foliage) fol.push_back({f.pos.x, f.pos.y, f.radius, f.kind});
  j["foliage"] = std::move(fol);

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("save_world: cannot open " + path);
  out << j.dump(2) << "\n";
}

World load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_world: cannot open " + path);
  json j = json::parse(in);
  if (j.value("format", "") != "worldspec/1")
    throw std::runtime_error("load_world: not a worldspec/1 file: " + path);

  World w;
  w.seed = j.at("seed").get<uint64_t>();
  w.lane_width = j.at("laneWidth").get<double>();
  const json& p = j.at("params");
  w.params.length = p.at("length").get<double>();
  w.params.step = p.at("step").get<double>();
  w.params.kappa_gain = p.at("kappaGain").get<double>();
  w.params.frequency = p.at("frequency").get<double>();
  w.params.ds = p.at("ds").get<double>();

  std::vector<CubicBezier> segs;
  for (const auto& row : j.at("segments")) {
    if (row.size() != 8) throw std::runtime_error("load_world: malformed segment");
    CubicBezier b;
    b.p0 = {row[0].get<double>(), row[1].get<double>()};
    b.p1 = {row[2].get<double>(), row[3].get<double>()};
    b.p2 = {row[4].get<double>(), row[5].get<double>()};
    b.p3 = {row[6].get<double>(), row[7].get<double>()};
    segs.push_back(b);
  }
  w.centerline.build(std::move(segs));

  for (const auto& row : j.at("foliage")) {
    if (row.size() != 4) throw std::runtime_error("load_world: malformed foliage row");
    Foliage f;
    f.pos = {row[0].get<double>(), row[1].get<double>()};
    f.radius = row[2].get<double>();
    f.kind = row[3].get<int>();
    w.foliage.push_back(f);
  }
  return w;
}

}  // namespace simgap
