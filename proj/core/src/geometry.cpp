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

#include "simgap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace simgap {

double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

Vec2 normalized(Vec2 a) {
  double n = norm(a);
  if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
  return {a.x / n, a.y / n};
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

Vec2 CubicBezier::eval(double t) const {
  double u = 1.0 - t;
  double b0 = u * u * u, b1 = 3.0 * u * u * t, b2 = 3.0 * u * t * t, b3 = t * t * t;
  return b0 * p0 + b1 * p1 + b2 * p2 + b3 * p3;
}

Vec2 CubicBezier::deriv(double t) const {
  double u = 1.0 - t;
  return 3.0 * u * u * (p1 - p0) + 6.0 * u * t * (p2 - p1) + 3.0 * t * t * (p3 - p2);
}

Vec2 CubicBezier::second(double t) const {
  double u = 1.0 - t;
  return 6.0 * u * (p2 - 2.0 * p1 + p0) + 6.0 * t * (p3 - 2.0 * p2 + p1);
}

double CubicBezier::curvature(double t) const {
  Vec2 d = deriv(t);
  Vec2 dd = second(t);
  double speed = norm(d);
  if (speed == 0.0) return 0.0;
  return cross(d, dd) / (speed * speed * speed);
}

namespace {

constexpr int kSamplesPerSegment = 64;

}  // namespace

void Path::build(std::vector<CubicBezier> segs) {
  if (segs.empty()) throw std::invalid_argument("path: no segments");
  segs_ = std::move(segs);
  table_.clear();
  double s = 0.0;
  for (size_t i = 0; i < segs_.size(); ++i) {
    Vec2 prev = segs_[i].eval(0.0);
    for (int k = 0; k < kSamplesPerSegment; ++k) {
      double t0 = static_cast<double>(k) / kSamplesPerSegment;
      double t1 = static_cast<double>(k + 1) / kSamplesPerSegment;
      table_.push_back({s, i, t0});
      Vec2 next = segs_[i].eval(t1);
      s += norm(next - prev);
      prev = next;
    }
  }
  table_.push_back({s, segs_.size() - 1, 1.0});
  total_ = s;
}

void Path::locate(double s, size_t* seg, double* t) const {
  s = std::clamp(s, 0.0, total_);
  auto it = std::upper_bound(table_.begin(), table_.end(), s,
                             [](double v, const Entry& e) { return v < e.s; });
  if (it != table_.begin()) --it;
  size_t i = static_cast<size_t>(it - table_.begin());
  if (i + 1 >= table_.size()) {
    *seg = segs_.size() - 1;
    *t = 1.0;
    return;
  }
  const Entry& a = table_[i];
  const Entry& b = table_[i + 1];
  double span = b.s - a.s;
  double frac = span > 0.0 ? (s - a.s) / span : 0.0;
  double tb = (b.seg == a.seg) ? b.t : 1.0;
  *seg = a.seg;
  *t = a.t + frac * (tb - a.t);
}

Vec2 Path::position(double s) const {
  size_t seg;
  double t;
  locate(s, &seg, &t);
  return segs_[seg].eval(t);
}

double Path::heading(double s) const {
  size_t seg;
  double t;
  locate(s, &seg, &t);
  Vec2 d = segs_[seg].deriv(t);
  return std::atan2(d.y, d.x);
}

double Path::curvature(double s) const {
  size_t seg;
  double t;
  locate(s, &seg, &t);
  return segs_[seg].curvature(t);
}

Vec2 Path::left_normal(double s) const {
  size_t seg;
  double t;
  locate(s, &seg, &t);
  Vec2 d = normalized(segs_[seg].deriv(t));
  return {-d.y, d.x};
}

double Path::project(Vec2 p, double hint, double window) const {
  double lo = 0.0, hi = total_;
  if (hint >= 0.0) {
    lo = std::max(0.0, hint - window);
    hi = std::min(total_, hint + window);
  }
  // coarse scan then ternary refinement on squared distance
  const int kCoarse = 64;
  double best_s = lo, best_d = 1e300;
  for (int i = 0; i <= kCoarse; ++i) {
    double s = lo + (hi - lo) * i / kCoarse;
    Vec2 q = position(s) - p;
    double d = dot(q, q);
    if (d < best_d) {
      best_d = d;
      best_s = s;
    }
  }
  double span = (hi - lo) / kCoarse;
  double a = std::max(lo, best_s - span), b = std::min(hi, best_s + span);
  for (int it = 0; it < 40; ++it) {
    double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    Vec2 q1 = position(m1) - p;
    Vec2 q2 = position(m2) - p;
    if (dot(q1, q1) < dot(q2, q2))
      b = m2;
    else
      a = m1;
  }
  return 0.5 * (a + b);
}

double Path::min_self_distance(double min_sep) const {
  const double ds = 1.0;
  std::vector<Vec2> pts;
  std::vector<double> ss;
  for (double s = 0.0; s <= total_; s += ds) {
    pts.push_back(position(s));
    ss.push_back(s);
  }
  double best = 1e300;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      if (ss[j] - ss[i] < min_sep) continue;
      double d = norm(pts[j] - pts[i]);
      best = std::min(best, d);
    }
  return best;
}

Path build_centerline(const CenterlineParams& params, uint64_t seed) {
  if (params.length <= 0 || params.step <= 0 || params.ds <= 0)
    throw std::invalid_argument("build_centerline: nonpositive sizes");
  GradientNoise1D noise(seed);
  auto kappa = [&](double s) {
    return params.kappa_gain * params.frequency * noise.sample(params.frequency * s);
  };

  // midpoint integration of heading and position, sampling a knot per step
  std::vector<Vec2> knots;
  std::vector<double> headings;
  Vec2 pos{0.0, 0.0};
  double theta = 0.0;
  double s = 0.0;
  double next_knot = 0.0;
  knots.push_back(pos);
  headings.push_back(theta);
  next_knot += params.step;
  while (s < params.length - 1e-9) {
    double h = std::min(params.ds, params.length - s);
    double theta_mid = theta + 0.5 * h * kappa(s + 0.5 * h);
    pos = pos + h * Vec2{std::cos(theta_mid), std::sin(theta_mid)};
    theta += h * kappa(s + 0.5 * h);
    s += h;
    if (s + 1e-9 >= next_knot || s >= params.length - 1e-9) {
      knots.push_back(pos);
      headings.push_back(theta);
      next_knot += params.step;
    }
  }
  if (knots.size() < 2) throw std::invalid_argument("build_centerline: road too short");

  std::vector<CubicBezier> segs;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    Vec2 a = knots[i], b = knots[i + 1];
    Vec2 ta{std::cos(headings[i]), std::sin(headings[i])};
    Vec2 tb{std::cos(headings[i + 1]), std::sin(headings[i + 1])};
    double chord = norm(b - a);
    CubicBezier seg;
    seg.p0 = a;
    seg.p1 = a + (chord / 3.0) * ta;
    seg.p2 = b - (chord / 3.0) * tb;
    seg.p3 = b;
    segs.push_back(seg);
  }
  Path path;
  path.build(std::move(segs));
  return path;
}

std::vector<Vec2> offset_polyline(const Path& path, double d, double ds) {
  std::vector<Vec2> out;
  for (double s = 0.0; s <= path.length(); s += ds)
    out.push_back(path.position(s) + d * path.left_normal(s));
  return out;
}

double mean_abs_curvature(const Path& path) {
  double acc = 0.0;
  int n = 0;
  for (double s = 0.0; s <= path.length(); s += 1.0) {
    acc += std::abs(path.curvature(s));
    ++n;
  }
  return n ? acc / n : 0.0;
}

}  // namespace simgap
