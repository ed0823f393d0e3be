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

#include "simgap/config.hpp"

namespace simgap {

struct PipelineOptions {
  std::string out_dir;
  bool run_ablations = false;  // the ablation campaign is opt-in, it dominates runtime
  bool reuse_existing = false;  // resume a long campaign: skip stages whose outputs exist
  bool check = false;           // verify the transfer/ablation orderings at the end
  bool quiet = false;
  // Stop after this stage; empty runs everything. One of gen, collect,
  // balance, train, baselines, eval-open, eval-closed, ablate, report.
  // The single-stage CLI subcommands run the pipeline up to their stage
  // with reuse enabled, so completed work is never redone.
  std::string until;
};

struct PipelineResult {
  int exit_code = 0;  // 0 ok, 3 stage failure, 4 ordering check failed
  std::string summary;
};

/// Runs gen, collect (both domains), balance, train (all seeds), baselines,
/// open- and closed-loop eval, optional ablations, then writes a report and
/// a manifest of every output with its content hash. Each stage failure is
/// tagged with the stage name. Deterministic in the config's master seed.
PipelineResult run_pipeline(const ExperimentConfig& cfg, const PipelineOptions& opt);

/// Recomputes the ordering checks from an existing pipeline tree.
PipelineResult check_pipeline(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace simgap
