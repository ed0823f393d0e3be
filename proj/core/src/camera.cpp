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

#include "simgap/camera.hpp"

#include <cmath>

namespace simgap {

namespace {

struct Basis {
  // camera axes in world coordinates: r right, d down, f forward
  double rx, ry, rz;
  double dx, dy, dz;
  double fx, fy, fz;
};

Basis make_basis(double heading, double pitch) {
  double ch = std::cos(heading), sh = std::sin(heading);
  double cp = std::cos(pitch), sp = std::sin(pitch);
  Basis b;
  b.fx = ch * cp;
  b.fy = sh * cp;
  b.fz = -sp;
  b.rx = sh;
  b.ry = -ch;
  b.rz = 0.0;
  // down = forward x right
  b.dx = b.fy * b.rz - b.fz * b.ry;
  b.dy = b.fz * b.rx - b.fx * b.rz;
  b.dz = b.fx * b.ry - b.fy * b.rx;
  return b;
}

}  // namespace

Camera Camera::standard(int w, int h) {
  Camera c;
  c.width = w;
  c.height = h;
  // 100 degree horizontal field of view
  double half = 50.0 * M_PI / 180.0;
  c.fx = (w / 2.0) / std::tan(half);
  c.fy = c.fx;
  c.cx = w / 2.0 - 0.5;
  c.cy = h / 2.0 - 0.5;
  return c;
}

bool Camera::project(Vec2 world, double z, Vec2 vehicle_pos, double vehicle_heading, double* u,
                     double* v) const {
  Basis b = make_basis(vehicle_heading, pitch);
  double ox = vehicle_pos.x + forward_m * std::cos(vehicle_heading);
  double oy = vehicle_pos.y + forward_m * std::sin(vehicle_heading);
  double px = world.x - ox, py = world.y - oy, pz = z - height_m;
  double zc = px * b.fx + py * b.fy + pz * b.fz;
  if (zc <= 1e-6) return false;
  double xc = px * b.rx + py * b.ry + pz * b.rz;
  double yc = px * b.dx + py * b.dy + pz * b.dz;
  *u = cx + fx * xc / zc;
  *v = cy + fy * yc / zc;
  return true;
}

bool Camera::ground_of_pixel(double u, double v, Vec2 vehicle_pos, double vehicle_heading,
                             Vec2* ground) const {
  Basis b = make_basis(vehicle_heading, pitch);
  double xr = (u - cx) / fx;
  double yd = (v - cy) / fy;
  double dx = xr * b.rx + yd * b.dx + b.fx;
  double dy = xr * b.ry + yd * b.dy + b.fy;
  double dz = xr * b.rz + yd * b.dz + b.fz;
  if (dz >= -1e-9) return false;  // ray does not descend to the ground
  double t = height_m / -dz;
  double ox = vehicle_pos.x + forward_m * std::cos(vehicle_heading);
  double oy = vehicle_pos.y + forward_m * std::sin(vehicle_heading);
  ground->x = ox + t * dx;
  ground->y = oy + t * dy;
  return true;
}

}  // namespace simgap
