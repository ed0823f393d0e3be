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

#include "simgap/camera.hpp"
#include "simgap/image.hpp"
#include "simgap/world.hpp"

namespace simgap {

/// Two looks over identical geometry. Sim is clean flat shading, the domain a
/// simulator would produce. TargetProxy layers world-anchored procedural
/// textures, a vignette, per-image gain jitter, and per-pixel sensor noise on
/// the same scene, standing in for a real camera feed with a domain gap.
enum class RenderStyle { kSim, kTargetProxy };

/// Renders the view from a vehicle pose. TargetProxy draws jitter and sensor
/// noise from `rng` (required); Sim never touches it. Texture content is keyed
/// to world.seed and world position, so the scenery does not swim between
/// frames.
Image render_view(const World& world, const Camera& cam, Vec2 vehicle_pos, double vehicle_heading,
                  RenderStyle style, Rng* rng);

const char* render_style_name(RenderStyle s);
RenderStyle render_style_from_name(const std::string& name);

}  // namespace simgap
