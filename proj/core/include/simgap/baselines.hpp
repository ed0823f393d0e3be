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

#include "simgap/trainer.hpp"

namespace simgap {

/// Behavior cloning: the sim encoder plus the controller on labeled frames,
/// no translation objectives. Optimizer split and checkpoint layout match
/// the joint trainer, so clones load with the same machinery. Backs the
/// simple-transfer baseline directly and the sim-to-real/latent-ada ones
/// with different data or an extra term.
TrainResult train_bc(const TrainConfig& cfg, const Dataset& ds, const PixelCache& cache,
                     const std::vector<int>& frames, const std::vector<int>& plan,
                     const std::string& out_dir, const std::string& resume_from = "");

/// Renders every frame of src through the model's from->to translation and
/// writes a dataset/1 tree mirroring src (same episodes, poses, labels, and
/// relative image paths). The translated images go through the 8-bit codec,
/// so training on them sees exactly what an image file would hold.
Dataset translate_dataset(TransferModel& model, Domain from, Domain to, const Dataset& src,
                          const PixelCache& cache, const std::string& out_dir);

/// Sim-to-real baseline trainer: translate the labeled sim set into the
/// target look with the given joint model, then behavior-clone on it. At
/// test time only the clone runs; no translator in its inference path.
TrainResult train_sim_to_real(const TrainConfig& cfg, TransferModel& translator,
                              const Dataset& sim_ds, const PixelCache& sim_cache,
                              const std::string& translated_dir, const std::string& out_dir);

struct AdaConfig {
  double lambda_domain = 1.0;  // weight of the domain-confusion term
  double grl = 1.0;            // gradient reversal strength into the encoder
};

/// Latent feature alignment baseline: one encoder over both domains feeds
/// the controller (sim labels only) while a latent domain head is trained
/// adversarially through gradient reversal. No image translation anywhere.
TrainResult train_ada(const TrainConfig& cfg, const AdaConfig& ada, const TrainData& data,
                      const std::string& out_dir, const std::string& resume_from = "");

}  // namespace simgap
