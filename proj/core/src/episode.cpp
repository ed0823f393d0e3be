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

#include "simgap/episode.hpp"

#include <algorithm>

#include "simgap/noise.hpp"

namespace simgap {

std::vector<StepRecord> run_expert_episode(const World& world, const EpisodeParams& params,
                                           uint64_t seed) {
  std::vector<StepRecord> out;
  VehicleState state;
  state.pos = world.centerline.position(params.start_s);
  state.heading = world.centerline.heading(params.start_s);

  OrnsteinUhlenbeck ou(params.ou_theta, params.ou_sigma, params.vehicle.dt,
                       derive_seed(seed, "episode:ou"));

  double stop_s = world.centerline.length() - params.end_margin;
  double hint = params.start_s;
  for (int step = 0; step < params.max_steps; ++step) {
    LaneError err = lane_error(world, state, hint);
    hint = err.s;
    if (err.s >= stop_s) break;

    StepRecord rec;
    rec.state = state;
    rec.s = err.s;
    rec.lateral = err.lateral;
    rec.heading_err = err.heading_err;
    rec.expert = expert_action(err, params.gains);
    rec.applied = std::clamp(rec.expert + ou.step(), -1.0, 1.0);
    out.push_back(rec);

    state = bicycle_step(state, rec.applied, params.vehicle);
  }
  return out;
}

}  // namespace simgap
