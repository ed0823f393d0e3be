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

#include "simgap/world.hpp"

namespace simgap {

struct VehicleState {
  Vec2 pos;
  double heading = 0.0;
};

/// Kinematic bicycle at fixed speed. Steering command is normalized to
/// [-1, 1] and maps linearly onto the wheel angle limit.
struct VehicleParams {
  double wheelbase = 2.5;   // metres
  double max_steer = 0.5;   // radians at |command| = 1
  double speed = 2.78;      // m/s, roughly 10 km/h
  double dt = 0.1;          // seconds per step
};

VehicleState bicycle_step(const VehicleState& state, double steer_command,
                          const VehicleParams& params);

/// Privileged simulator-state error terms, available to the expert and the
/// evaluator but never to a learned policy.
struct LaneError {
  double s = 0.0;            // arc length of closest centerline point
  double lateral = 0.0;      // signed, left of centerline positive
  double heading_err = 0.0;  // wrapped, radians
};

LaneError lane_error(const World& world, const VehicleState& state, double hint_s = -1.0);

/// Proportional lane keeper on privileged state. Returns a command in [-1, 1].
struct ExpertGains {
  double k_lat = 0.9;
  double k_head = 4.0;
};

double expert_action(const LaneError& err, const ExpertGains& gains);

}  // namespace simgap
