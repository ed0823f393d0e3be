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

#include <string>
#include <vector>

#include "json.hpp"
#include "simgap/checkpoint.hpp"
#include "simgap/dataset.hpp"
#include "simgap/losses.hpp"
#include "simgap/model.hpp"

namespace simgap {

/// Drop modes zero exactly one weight while the step still computes every
/// term, so the random streams stay aligned across modes and trajectories
/// are comparable bit for bit. Stethoscope keeps all weights but severs the
/// controller's gradient path into the translator.
enum class AblationMode {
  kNone,
  kDropRecon,
  kDropCyc,
  kDropCycControl,
  kDropGan,
  kDropPerceptual,
  kDropZRecon,
  kStethoscope,
};
const char* ablation_name(AblationMode m);
AblationMode ablation_from_name(const std::string& name);
LossWeights apply_ablation(LossWeights w, AblationMode m);

struct TrainConfig {
  ModelConfig model;
  int batch_size = 8;
  int iterations = 20000;
  LossWeights weights;
  double adam_lr = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double sgd_lr = 0.01;
  uint64_t seed = 1;
  AblationMode ablation = AblationMode::kNone;
  int log_every = 50;
  int checkpoint_every = 5000;
};

/// Training inputs. sim_frames/target_frames index into the datasets' frame
/// lists (normally the train split); sim_plan holds balanced-sampler
/// positions into sim_frames. Target labels are never touched by training;
/// only the image bytes of target frames are read.
struct TrainData {
  const Dataset* sim = nullptr;
  const PixelCache* sim_cache = nullptr;
  std::vector<int> sim_frames;
  std::vector<int> sim_plan;
  const Dataset* target = nullptr;
  const PixelCache* target_cache = nullptr;
  std::vector<int> target_frames;
};

struct StepMetrics {
  LossBreakdown g;
  double d_total = 0.0, d_sim = 0.0, d_real = 0.0;
};

/// Everything a resume needs: parameters, both Adam states, the iteration
/// counter, and the three named random streams. The checkpoint layout is
/// fixed here and shared by the joint trainer and every baseline trainer,
/// so any final.ckpt can be reloaded uniformly.
struct TrainState {
  TrainConfig cfg;
  TransferModel model;
  Adam adam_translator;
  Adam adam_discs;
  Sgd sgd_ctrl;
  int64_t iteration = 0;
  Rng rng_sim;     // sim batch sampler
  Rng rng_target;  // target batch sampler
  Rng rng_noise;   // latent noise, drawn z_s, z_r, z_sr, z_rs per step

  explicit TrainState(const TrainConfig& cfg);
  CheckpointRefs refs();
  void save(const std::string& path);
  void load(const std::string& path);
};

/// One joint step: discriminators first on detached translations, then the
/// translator+controller on the full weighted objective scored against the
/// just-updated discriminators. sim_labels come from the labeled domain only.
StepMetrics train_step(TrainState& st, const Tensor& sim_batch,
                       const std::vector<float>& sim_labels, const Tensor& target_batch);

/// (B,3,H,W) float batch in [-1,1] from cached frames; picks index into
/// frame_indices.
Tensor make_image_batch(const PixelCache& cache, const std::vector<int>& frame_indices,
                        const std::vector<int>& picks);
std::vector<float> gather_labels(const Dataset& ds, const std::vector<int>& frame_indices,
                                 const std::vector<int>& picks);

struct TrainResult {
  std::string final_checkpoint;
  std::string loss_csv;
};

/// Runs the loop to cfg.iterations, logging a CSV row every log_every steps
/// and checkpointing at the configured cadence plus once at the end. Passing
/// resume_from continues an interrupted run exactly.
TrainResult train(const TrainConfig& cfg, const TrainData& data, const std::string& out_dir,
                  const std::string& resume_from = "");

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

/// Loads just the parameters of any trainer checkpoint into a fresh model.
TransferModel load_model_from_checkpoint(const std::string& path, const ModelConfig& cfg);
ModelConfig model_config_of_checkpoint(const std::string& path);

struct AblationRow {
  AblationMode mode = AblationMode::kNone;
  double mean_mae = 0.0, mean_bmae = 0.0;
  double mae_multiplier = 0.0, bmae_multiplier = 0.0;
  std::vector<double> per_seed_bmae;
};

struct AblationSuiteResult {
  double base_mae = 0.0, base_bmae = 0.0;
  std::vector<AblationRow> rows;
};

/// Trains every requested mode over the given seeds and reports target-domain
/// error multipliers against the unablated average. baseline_ckpts may hand
/// in already-trained unablated runs (one per seed); when empty the suite
/// trains them itself. reuse_existing skips any run whose final checkpoint is
/// already on disk, for restartable long campaigns.
AblationSuiteResult run_ablation_suite(const TrainConfig& base_cfg, const TrainData& data,
                                       const Dataset& target_ds,
                                       const std::vector<int>& target_test_frames,
                                       const PixelCache& target_cache,
                                       const std::vector<uint64_t>& seeds,
                                       const std::vector<AblationMode>& modes,
                                       const std::string& out_dir,
                                       const std::vector<std::string>& baseline_ckpts = {},
                                       bool reuse_existing = false);

nlohmann::json ablation_suite_to_json(const AblationSuiteResult& r);

}  // namespace simgap
