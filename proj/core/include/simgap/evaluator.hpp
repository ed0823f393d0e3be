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

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "simgap/dataset.hpp"
#include "simgap/model.hpp"

namespace simgap {

/// A named steering function over images. Pure at inference; output bounded
/// to [-1, 1] by construction (tanh heads, or a constant). The closed-loop
/// harness calls observe() with privileged simulator state before each
/// steer(); every learned policy ignores it, only the test oracle reads it.
class Policy {
 public:
  explicit Policy(std::string name) : name_(std::move(name)) {}
  virtual ~Policy() = default;
  const std::string& name() const { return name_; }
  virtual double steer(const Image& img) = 0;
  virtual void observe(const World& world, const VehicleState& state) {
    (void)world;
    (void)state;
  }

 private:
  std::string name_;
};

std::unique_ptr<Policy> make_drive_straight();

/// Controller over the named domain encoder, no translation: C(E_d(X)).
std::unique_ptr<Policy> make_model_policy(std::shared_ptr<TransferModel> model, Domain encoder,
                                          std::string name);

/// Translate with one model, steer with another: ctrl's C(E_{ctrl_domain}(.))
/// applied to the quantized image of translator's from->to translation. The
/// intermediate really is an 8-bit image, so the composition matches a manual
/// two-stage invocation exactly.
std::unique_ptr<Policy> make_translating_policy(std::shared_ptr<TransferModel> translator,
                                                Domain from, Domain to,
                                                std::shared_ptr<TransferModel> ctrl,
                                                Domain ctrl_domain, std::string name);

enum class PolicyKind {
  kFullModel,
  kDriveStraight,
  kSimpleTransfer,
  kRealToSim,
  kSimToReal,
  kLatentAda,
};
const char* policy_kind_name(PolicyKind k);
PolicyKind policy_kind_from_name(const std::string& name);

/// Trained pieces the baselines are assembled from. full carries the joint
/// translator+controller; bc is the sim-only behavior clone; s2r is the clone
/// trained on sim images translated into the target look; ada is the clone
/// trained with latent-space domain alignment. Only the pieces a given
/// baseline names need to be present.
struct BaselineArtifacts {
  std::shared_ptr<TransferModel> full;
  std::shared_ptr<TransferModel> bc;
  std::shared_ptr<TransferModel> s2r;
  std::shared_ptr<TransferModel> ada;
};

std::unique_ptr<Policy> make_baseline(PolicyKind kind, const BaselineArtifacts& artifacts);

double mae(const std::vector<double>& preds, const std::vector<double>& labels);

struct OpenLoopResult {
  double mae = 0.0;
  double balanced_mae = 0.0;
  std::array<double, BinSpec::kCount> bin_mae{};
  std::array<int64_t, BinSpec::kCount> bin_count{};
  int64_t frames = 0;
};

/// Balanced-MAE = mean of per-bin MAEs over nonempty bins; empty bins are
/// excluded, so uniform occupancy collapses it to plain MAE.
OpenLoopResult open_loop_eval(const std::vector<double>& preds,
                              const std::vector<double>& labels);

/// Runs the policy over the selected frames of a decoded dataset.
std::vector<double> predict_dataset(Policy& policy, const Dataset& ds,
                                    const std::vector<int>& frame_indices,
                                    const PixelCache& cache);

struct ClosedLoopParams {
  VehicleParams vehicle;
  ExpertGains expert_gains;  // used only by the privileged oracle policy
  Camera camera = Camera::standard(64, 48);
  CenterlineParams road;
  double lane_width = 3.5;
  double margin = 0.5;           // intervention beyond laneWidth/2 + margin
  double heading_limit = 1.5707963267948966;
  double start_s = 5.0;
  double end_margin = 5.0;
  double max_meters = 3000.0;
  double early_stop_meters = 250.0;  // past this, a rate worse than
  double early_stop_rate = 250.0;    // early_stop_rate m/intervention ends the run
  int max_steps_per_world = 4000;
};

struct WorldRunStats {
  uint64_t seed = 0;
  double meters = 0.0;
  int interventions = 0;
};

struct ClosedLoopResult {
  double total_meters = 0.0;
  int interventions = 0;
  double meters_per_intervention = 0.0;  // total / max(1, interventions)
  bool terminated_early = false;
  std::vector<WorldRunStats> per_world;
};

/// Drives the policy through freshly generated worlds until max_meters is
/// covered or the seeds run out. An intervention resets the vehicle to lane
/// center, tangent aligned, and counts once.
ClosedLoopResult closed_loop(Policy& policy, const std::vector<uint64_t>& world_seeds,
                             RenderStyle style, const ClosedLoopParams& params);

/// Privileged-state expert wrapped as a Policy, for harness validation only.
/// Reads simulator ground truth via observe(), so it must never appear in a
/// results table.
std::unique_ptr<Policy> make_oracle_policy(const ExpertGains& gains);

struct EvalReport {
  std::string policy;
  std::string checkpoint;
  std::string config_id;
  bool has_open_sim = false, has_open_target = false, has_closed = false;
  OpenLoopResult open_sim, open_target;
  ClosedLoopResult closed;
};

/// evalreport/1 round trip plus a fixed-width table for humans. The table
/// prints open- and closed-loop families side by side and draws no conclusion
/// from one about the other.
nlohmann::json report_to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);
std::string report_table(const std::vector<EvalReport>& reports);

}  // namespace simgap
