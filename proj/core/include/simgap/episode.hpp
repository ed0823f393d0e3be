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

#include <vector>

#include "simgap/vehicle.hpp"

namespace simgap {

struct EpisodeParams {
  VehicleParams vehicle;
  ExpertGains gains;
  double ou_theta = 0.6;
  double ou_sigma = 0.45;
  double start_s = 5.0;
  double end_margin = 5.0;  // stop this short of the road end
  int max_steps = 2000;
};

/// One recorded step. The stored action is the clean expert output at the
/// pose the vehicle actually reached; the perturbation only affects what got
/// driven, never the label.
struct StepRecord {
  VehicleState state;
  double s = 0.0;
  double lateral = 0.0;
  double heading_err = 0.0;
  double expert = 0.0;   // supervision label
  double applied = 0.0;  // expert plus exploration noise, clamped
};

/// Drives the expert with mean-reverting steering perturbation down the road,
/// starting on the centerline at start_s. Deterministic in (world, seed).
std::vector<StepRecord> run_expert_episode(const World& world, const EpisodeParams& params,
                                           uint64_t seed);

}  // namespace simgap
