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

#include "simgap/vehicle.hpp"

#include <algorithm>
#include <cmath>

namespace simgap {

VehicleState bicycle_step(const VehicleState& state, double steer_command,
                          const VehicleParams& params) {
  double cmd = std::clamp(steer_command, -1.0, 1.0);
  double delta = cmd * params.max_steer;
  VehicleState next;
  next.pos.x = state.pos.x + params.dt * params.speed * std::cos(state.heading);
  next.pos.y = state.pos.y + params.dt * params.speed * std::sin(state.heading);
  next.heading =
      state.heading + params.dt * params.speed / params.wheelbase * std::tan(delta);
  return next;
}

LaneError lane_error(const World& world, const VehicleState& state, double hint_s) {
  LaneError e;
  e.s = world.centerline.project(state.pos, hint_s);
  Vec2 c = world.centerline.position(e.s);
  e.lateral = dot(state.pos - c, world.centerline.left_normal(e.s));
  e.heading_err = wrap_angle(state.heading - world.centerline.heading(e.s));
  return e;
}

double expert_action(const LaneError& err, const ExpertGains& gains) {
  double a = -(gains.k_lat * err.lateral + gains.k_head * err.heading_err);
  return std::clamp(a, -1.0, 1.0);
}

}  // namespace simgap
