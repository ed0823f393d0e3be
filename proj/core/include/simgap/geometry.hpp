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
#include <vector>

#include "simgap/noise.hpp"

namespace simgap {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);
Vec2 normalized(Vec2 a);
double wrap_angle(double a);  // into (-pi, pi]

struct CubicBezier {
  Vec2 p0, p1, p2, p3;
  Vec2 eval(double t) const;
  Vec2 deriv(double t) const;
  Vec2 second(double t) const;
  double curvature(double t) const;  // signed, left turn positive
};

/// Piecewise cubic curve with an arc-length lookup table. Segments share
/// endpoints exactly and tangent directions at joints, so the trace is C0
/// and G1 by construction.
class Path {
 public:
  void build(std::vector<CubicBezier> segs);

  double length() const { return total_; }
  size_t segment_count() const { return segs_.size(); }
  const CubicBezier& segment(size_t i) const { return segs_[i]; }

  Vec2 position(double s) const;
  double heading(double s) const;    // tangent angle, radians
  double curvature(double s) const;  // signed
  Vec2 left_normal(double s) const;

  /// Arc length of the point on the path closest to p. With hint >= 0 the
  /// search stays within a +-window metres neighbourhood of the hint, which
  /// closed-loop stepping relies on to stay cheap and to avoid snapping to a
  /// distant part of a winding road.
  double project(Vec2 p, double hint = -1.0, double window = 8.0) const;

  /// Minimum distance between two points on the path whose arc-length
  /// separation is at least min_sep. Small values mean the corridor folds
  /// onto itself.
  double min_self_distance(double min_sep) const;

 private:
  struct Entry {
    double s;  // cumulative arc length at sample
    size_t seg;
    double t;
  };
  void locate(double s, size_t* seg, double* t) const;

  std::vector<CubicBezier> segs_;
  std::vector<Entry> table_;
  double total_ = 0.0;
};

struct CenterlineParams {
  double length = 250.0;      // metres of road
  double step = 10.0;         // metres per fitted segment
  double kappa_gain = 0.045;  // peak curvature scale, 1/m
  double frequency = 0.02;    // noise frequency along arc length, 1/m
  double ds = 0.25;           // heading integration step, metres
};

/// Integrates curvature kappa(s) = kappa_gain * frequency * noise(frequency*s)
/// into a pose trace and fits one cubic segment per `step` metres, matching
/// positions and tangent directions at the joints. The frequency factor in
/// front keeps mean absolute curvature growing with frequency instead of
/// merely wiggling faster.
Path build_centerline(const CenterlineParams& params, uint64_t seed);

/// Offset polyline at signed lateral distance d (left positive), sampled
/// every `ds` metres of centerline arc length.
std::vector<Vec2> offset_polyline(const Path& path, double d, double ds);

/// Mean |curvature| sampled every metre. The worldgen monotonicity check
/// (higher frequency, twistier road) runs on this.
double mean_abs_curvature(const Path& path);

}  // namespace simgap
