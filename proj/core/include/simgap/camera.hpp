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

namespace simgap {

/// Forward-facing pinhole camera on a ground vehicle. World frame is x/y on
/// the ground plane with z up; the camera sits height_m above the vehicle
/// reference point (plus forward_m along heading) and pitches down by pitch.
/// Image frame: u right, v down, origin at the top-left pixel center.
struct Camera {
  int width = 64;
  int height = 48;
  double fx = 26.85;
  double fy = 26.85;
  double cx = 31.5;
  double cy = 23.5;
  double height_m = 1.4;
  double pitch = 0.25;     // radians below horizontal
  double forward_m = 0.5;  // mount offset ahead of the vehicle reference point

  static Camera standard(int w, int h);

  /// World point (with elevation z) to pixel. False when the point is not in
  /// front of the camera.
  bool project(Vec2 world, double z, Vec2 vehicle_pos, double vehicle_heading, double* u,
               double* v) const;

  /// Ground-plane intersection of the ray through pixel (u, v). False at or
  /// above the horizon.
  bool ground_of_pixel(double u, double v, Vec2 vehicle_pos, double vehicle_heading,
                       Vec2* ground) const;
};

}  // namespace simgap
