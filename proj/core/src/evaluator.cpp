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

#include "simgap/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace simgap {

namespace {

class DriveStraightPolicy : public Policy {
 public:
  DriveStraightPolicy() : Policy("drive-straight") {}
  double steer(const Image&) override { return 0.0; }
};

Tensor batch_of(const Image& img) {
  Tensor t = image_to_tensor(img);
  t.shape = {1, t.dim(0), t.dim(1), t.dim(2)};
  return t;
}

Image image_of_batch(const Tensor& t) {
  Tensor u = t;  // (1,3,H,W) -> (3,H,W), same storage order
  u.shape = {t.dim(1), t.dim(2), t.dim(3)};
  return tensor_to_image(u);
}

class ModelPolicy : public Policy {
 public:
  ModelPolicy(std::shared_ptr<TransferModel> model, Domain encoder, std::string name)
      : Policy(std::move(name)), model_(std::move(model)), encoder_(encoder) {}

  double steer(const Image& img) override {
    TapeT<float> tape;
    ModelOps<float> ops(tape, *model_);
    auto x = tape.constant(batch_of(img));
    auto z = ops.encode(encoder_, x);
    auto c = ops.predict_control(z);
    return static_cast<double>(tape.scalar(c));
  }

 private:
  std::shared_ptr<TransferModel> model_;
  Domain encoder_;
};

class TranslatingPolicy : public Policy {
 public:
  TranslatingPolicy(std::shared_ptr<TransferModel> translator, Domain from, Domain to,
                    std::shared_ptr<TransferModel> ctrl, Domain ctrl_domain, std::string name)
      : Policy(std::move(name)),
        translator_(std::move(translator)),
        from_(from),
        to_(to),
        ctrl_(std::move(ctrl)),
        ctrl_domain_(ctrl_domain) {}

  Image translate_image(const Image& img) {
    TapeT<float> tape;
    ModelOps<float> ops(tape, *translator_);
    auto x = tape.constant(batch_of(img));
    auto y = ops.translate(from_, to_, x);
    return image_of_batch(tape.val(y));
  }

  double steer(const Image& img) override {
    Image translated = translate_image(img);
    TapeT<float> tape;
    ModelOps<float> ops(tape, *ctrl_);
    auto x = tape.constant(batch_of(translated));
    auto c = ops.predict_control(ops.encode(ctrl_domain_, x));
    return static_cast<double>(tape.scalar(c));
  }

 private:
  std::shared_ptr<TransferModel> translator_;
  Domain from_, to_;
  std::shared_ptr<TransferModel> ctrl_;
  Domain ctrl_domain_;
};

class OraclePolicy : public Policy {
 public:
  explicit OraclePolicy(const ExpertGains& gains) : Policy("oracle"), gains_(gains) {}

  void observe(const World& world, const VehicleState& state) override {
    LaneError err = lane_error(world, state, hint_);
    hint_ = err.s;
    action_ = expert_action(err, gains_);
  }

  double steer(const Image&) override { return action_; }

 private:
  ExpertGains gains_;
  double hint_ = -1.0;
  double action_ = 0.0;
};

std::shared_ptr<TransferModel> require(const std::shared_ptr<TransferModel>& m,
                                       const char* what) {
  if (!m) throw std::runtime_error(std::string("make_baseline: missing artifact: ") + what);
  return m;
}

}  // namespace

std::unique_ptr<Policy> make_drive_straight() { return std::make_unique<DriveStraightPolicy>(); }

std::unique_ptr<Policy> make_model_policy(std::shared_ptr<TransferModel> model, Domain encoder,
                                          std::string name) {
  return std::make_unique<ModelPolicy>(std::move(model), encoder, std::move(name));
}

std::unique_ptr<Policy> make_translating_policy(std::shared_ptr<TransferModel> translator,
                                                Domain from, Domain to,
                                                std::shared_ptr<TransferModel> ctrl,
                                                Domain ctrl_domain, std::string name) {
  return std::make_unique<TranslatingPolicy>(std::move(translator), from, to, std::move(ctrl),
                                             ctrl_domain, std::move(name));
}

std::unique_ptr<Policy> make_oracle_policy(const ExpertGains& gains) {
  return std::make_unique<OraclePolicy>(gains);
}

const char* policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::kFullModel: return "full";
    case PolicyKind::kDriveStraight: return "drive-straight";
    case PolicyKind::kSimpleTransfer: return "simple-transfer";
    case PolicyKind::kRealToSim: return "real-to-sim";
    case PolicyKind::kSimToReal: return "sim-to-real";
    case PolicyKind::kLatentAda: return "latent-ada";
  }
  return "?";
}

PolicyKind policy_kind_from_name(const std::string& name) {
  for (PolicyKind k : {PolicyKind::kFullModel, PolicyKind::kDriveStraight,
                       PolicyKind::kSimpleTransfer, PolicyKind::kRealToSim,
                       PolicyKind::kSimToReal, PolicyKind::kLatentAda})
    if (name == policy_kind_name(k)) return k;
  throw std::invalid_argument("unknown policy kind: " + name);
}

std::unique_ptr<Policy> make_baseline(PolicyKind kind, const BaselineArtifacts& a) {
  switch (kind) {
    case PolicyKind::kFullModel:
      return make_model_policy(require(a.full, "full"), Domain::kReal, "full");
    case PolicyKind::kDriveStraight:
      return make_drive_straight();
    case PolicyKind::kSimpleTransfer:
      // Sim-trained clone applied directly to whatever image arrives.
      return make_model_policy(require(a.bc, "bc"), Domain::kSim, "simple-transfer");
    case PolicyKind::kRealToSim:
      // Target image rendered into the sim look, then the sim clone drives.
      return make_translating_policy(require(a.full, "full"), Domain::kReal, Domain::kSim,
                                     require(a.bc, "bc"), Domain::kSim, "real-to-sim");
    case PolicyKind::kSimToReal:
      // Clone trained on sim-to-target translations; no translator at test.
      return make_model_policy(require(a.s2r, "s2r"), Domain::kSim, "sim-to-real");
    case PolicyKind::kLatentAda:
      return make_model_policy(require(a.ada, "ada"), Domain::kSim, "latent-ada");
  }
  throw std::invalid_argument("make_baseline: bad kind");
}

double mae(const std::vector<double>& preds, const std::vector<double>& labels) {
  if (preds.size() != labels.size()) throw std::invalid_argument("mae: length mismatch");
  if (preds.empty()) throw std::invalid_argument("mae: empty input");
  double sum = 0.0;
  for (size_t i = 0; i < preds.size(); ++i) sum += std::abs(preds[i] - labels[i]);
  return sum / static_cast<double>(preds.size());
}

OpenLoopResult open_loop_eval(const std::vector<double>& preds,
                              const std::vector<double>& labels) {
  OpenLoopResult r;
  r.mae = mae(preds, labels);
  r.frames = static_cast<int64_t>(preds.size());
  std::array<double, BinSpec::kCount> sums{};
  for (size_t i = 0; i < preds.size(); ++i) {
    int b = BinSpec::assign(labels[i]);
    sums[static_cast<size_t>(b)] += std::abs(preds[i] - labels[i]);
    ++r.bin_count[static_cast<size_t>(b)];
  }
  int nonempty = 0;
  double bal = 0.0;
  for (int b = 0; b < BinSpec::kCount; ++b) {
    if (r.bin_count[static_cast<size_t>(b)] == 0) continue;
    r.bin_mae[static_cast<size_t>(b)] =
        sums[static_cast<size_t>(b)] / static_cast<double>(r.bin_count[static_cast<size_t>(b)]);
    bal += r.bin_mae[static_cast<size_t>(b)];
    ++nonempty;
  }
  r.balanced_mae = nonempty ? bal / nonempty : 0.0;
  return r;
}

std::vector<double> predict_dataset(Policy& policy, const Dataset& ds,
                                    const std::vector<int>& frame_indices,
                                    const PixelCache& cache) {
  std::vector<double> preds;
  preds.reserve(frame_indices.size());
  Image img;
  img.width = cache.width;
  img.height = cache.height;
  for (int idx : frame_indices) {
    img.pixels = cache.frames.at(static_cast<size_t>(idx));
    preds.push_back(policy.steer(img));
  }
  (void)ds;
  return preds;
}

ClosedLoopResult closed_loop(Policy& policy, const std::vector<uint64_t>& world_seeds,
                             RenderStyle style, const ClosedLoopParams& params) {
  ClosedLoopResult result;
  for (uint64_t ws : world_seeds) {
    if (result.total_meters >= params.max_meters) break;
    World world = generate_world(params.road, params.lane_width, ws);
    WorldRunStats stats;
    stats.seed = ws;

    VehicleState state;
    state.pos = world.centerline.position(params.start_s);
    state.heading = world.centerline.heading(params.start_s);
    double hint = params.start_s;
    double end_s = world.centerline.length() - params.end_margin;
    Rng frame_rng(derive_seed(ws, "closedloop:frames"));

    for (int step = 0; step < params.max_steps_per_world; ++step) {
      policy.observe(world, state);
      Image view = render_view(world, params.camera, state.pos, state.heading, style,
                               style == RenderStyle::kTargetProxy ? &frame_rng : nullptr);
      double cmd = policy.steer(view);
      state = bicycle_step(state, cmd, params.vehicle);
      double meters = params.vehicle.speed * params.vehicle.dt;
      stats.meters += meters;
      result.total_meters += meters;

      LaneError err = lane_error(world, state, hint);
      hint = err.s;
      if (std::abs(err.lateral) > world.lane_width / 2.0 + params.margin ||
          std::abs(err.heading_err) > params.heading_limit) {
        ++stats.interventions;
        ++result.interventions;
        state.pos = world.centerline.position(err.s);
        state.heading = world.centerline.heading(err.s);
      }
      if (err.s >= end_s) break;
      if (result.total_meters >= params.max_meters) break;
    }

    result.per_world.push_back(stats);
    double rate = result.total_meters / std::max(1, result.interventions);
    if (result.total_meters >= params.early_stop_meters && rate < params.early_stop_rate) {
      result.terminated_early = true;
      break;
    }
  }
  result.meters_per_intervention = result.total_meters / std::max(1, result.interventions);
  return result;
}

namespace {

nlohmann::json open_to_json(const OpenLoopResult& r) {
  nlohmann::json j;
  j["mae"] = r.mae;
  j["balancedMae"] = r.balanced_mae;
  j["frames"] = r.frames;
  j["binMae"] = r.bin_mae;
  j["binCount"] = r.bin_count;
  return j;
}

OpenLoopResult open_from_json(const nlohmann::json& j) {
  OpenLoopResult r;
  r.mae = j.at("mae").get<double>();
  r.balanced_mae = j.at("balancedMae").get<double>();
  r.frames = j.at("frames").get<int64_t>();
  auto bm = j.at("binMae").get<std::vector<double>>();
  auto bc = j.at("binCount").get<std::vector<int64_t>>();
  if (bm.size() != BinSpec::kCount || bc.size() != BinSpec::kCount)
    throw std::runtime_error("evalreport: bad bin table size");
  std::copy(bm.begin(), bm.end(), r.bin_mae.begin());
  std::copy(bc.begin(), bc.end(), r.bin_count.begin());
  return r;
}

nlohmann::json closed_to_json(const ClosedLoopResult& r) {
  nlohmann::json j;
  j["totalMeters"] = r.total_meters;
  j["interventions"] = r.interventions;
  j["metersPerIntervention"] = r.meters_per_intervention;
  j["terminatedEarly"] = r.terminated_early;
  nlohmann::json pw = nlohmann::json::array();
  for (const auto& w : r.per_world)
    pw.push_back({{"seed", w.seed}, {"meters", w.meters}, {"interventions", w.interventions}});
  j["perWorld"] = pw;
  return j;
}

ClosedLoopResult closed_from_json(const nlohmann::json& j) {
  ClosedLoopResult r;
  r.total_meters = j.at("totalMeters").get<double>();
  r.interventions = j.at("interventions").get<int>();
  r.meters_per_intervention = j.at("metersPerIntervention").get<double>();
  r.terminated_early = j.at("terminatedEarly").get<bool>();
  for (const auto& w : j.at("perWorld")) {
    WorldRunStats s;
    s.seed = w.at("seed").get<uint64_t>();
    s.meters = w.at("meters").get<double>();
    s.interventions = w.at("interventions").get<int>();
    r.per_world.push_back(s);
  }
  return r;
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["format"] = "evalreport/1";
  j["policy"] = r.policy;
  j["checkpoint"] = r.checkpoint;
  j["configId"] = r.config_id;
  if (r.has_open_sim) j["openSim"] = open_to_json(r.open_sim);
  if (r.has_open_target) j["openTarget"] = open_to_json(r.open_target);
  if (r.has_closed) j["closed"] = closed_to_json(r.closed);
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "evalreport/1")
    throw std::runtime_error("evalreport: unsupported format");
  EvalReport r;
  r.policy = j.at("policy").get<std::string>();
  r.checkpoint = j.value("checkpoint", "");
  r.config_id = j.value("configId", "");
  if (j.contains("openSim")) {
    r.has_open_sim = true;
    r.open_sim = open_from_json(j.at("openSim"));
  }
  if (j.contains("openTarget")) {
    r.has_open_target = true;
    r.open_target = open_from_json(j.at("openTarget"));
  }
  if (j.contains("closed")) {
    r.has_closed = true;
    r.closed = closed_from_json(j.at("closed"));
  }
  return r;
}

std::string report_table(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-18s %10s %10s %10s %10s %12s %6s\n", "policy", "sim MAE",
                "sim BMAE", "tgt MAE", "tgt BMAE", "m/interv", "interv");
  out << line;
  out << std::string(80, '-') << "\n";
  auto cell = [](bool has, double v) {
    char buf[32];
    if (has)
      std::snprintf(buf, sizeof(buf), "%10.4f", v);
    else
      std::snprintf(buf, sizeof(buf), "%10s", "-");
    return std::string(buf);
  };
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-18s ", r.policy.c_str());
    out << line;
    out << cell(r.has_open_sim, r.open_sim.mae) << " ";
    out << cell(r.has_open_sim, r.open_sim.balanced_mae) << " ";
    out << cell(r.has_open_target, r.open_target.mae) << " ";
    out << cell(r.has_open_target, r.open_target.balanced_mae) << " ";
    if (r.has_closed) {
      std::snprintf(line, sizeof(line), "%12.1f %6d", r.closed.meters_per_intervention,
                    r.closed.interventions);
      out << line;
    } else {
      std::snprintf(line, sizeof(line), "%12s %6s", "-", "-");
      out << line;
    }
    out << "\n";
  }
  out << "(open- and closed-loop families are reported side by side; they are\n"
         "known to correlate only weakly, so neither substitutes for the other)\n";
  return out.str();
}

}  // namespace simgap
