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
#include "simgap/evaluator.hpp"
#include "simgap/trainer.hpp"

namespace simgap {

/// One experiment, one document, schema "expcfg/1". Every stochastic stage
/// derives its seed from master_seed and its own name. finalize() copies the
/// shared knobs (model, road, camera, vehicle) into the nested train/eval
/// structs so downstream code reads one source of truth.
struct ExperimentConfig {
  uint64_t master_seed = 1;

  CenterlineParams road;
  double lane_width = 3.5;
  Camera camera = Camera::standard(64, 48);
  EpisodeParams episode;

  int frames_per_domain = 8000;
  int max_episodes = 512;
  double train_frac = 0.8;
  double val_frac = 0.0;

  ModelConfig model;
  TrainConfig train;
  std::vector<uint64_t> train_seeds = {1, 2, 3};

  ClosedLoopParams eval;
  int closed_worlds = 10;

  std::vector<PolicyKind> baselines;
  std::vector<AblationMode> ablation_modes;
  std::vector<uint64_t> ablation_seeds;

  void finalize();
};

struct ConfigIssues {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
  std::string joined() const;
};

ExperimentConfig default_config();

/// Parses and range-checks, reporting every violation rather than the first.
/// Unknown fields become warnings with their JSON path. On errors the
/// returned config is not usable.
ExperimentConfig config_from_json(const nlohmann::json& j, ConfigIssues& issues);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::string& path, ConfigIssues& issues);

}  // namespace simgap
