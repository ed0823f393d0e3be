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

#include "simgap/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace simgap {

void ExperimentConfig::finalize() {
  train.model = model;
  eval.road = road;
  eval.lane_width = lane_width;
  eval.camera = camera;
  eval.vehicle = episode.vehicle;
  eval.expert_gains = episode.gains;
}

std::string ConfigIssues::joined() const {
  std::ostringstream out;
  for (const auto& e : errors) out << "error: " << e << "\n";
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  return out.str();
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.baselines = {PolicyKind::kDriveStraight, PolicyKind::kSimpleTransfer};
  cfg.finalize();
  return cfg;
}

namespace {

// Pulls a field if present, collecting range violations without stopping.
struct Reader {
  const nlohmann::json& j;
  std::string path;
  ConfigIssues& issues;
  std::set<std::string> seen;

  bool grab(const char* key, const nlohmann::json** out) {
    seen.insert(key);
    auto it = j.find(key);
    if (it == j.end()) return false;
    *out = &*it;
    return true;
  }

  template <typename T>
  void num(const char* key, T* dst, double lo, double hi, bool lo_open = false) {
    const nlohmann::json* v;
    if (!grab(key, &v)) return;
    if (!v->is_number()) {
      issues.errors.push_back(path + key + ": expected a number");
      return;
    }
    double d = v->get<double>();
    if (d < lo || d > hi || (lo_open && d == lo)) {
      std::ostringstream msg;
      msg << path << key << ": " << d << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi
          << "]";
      issues.errors.push_back(msg.str());
      return;
    }
    *dst = static_cast<T>(d);
  }

  void u64(const char* key, uint64_t* dst) {
    const nlohmann::json* v;
    if (!grab(key, &v)) return;
    if (!v->is_number_unsigned() && !v->is_number_integer()) {
      issues.errors.push_back(path + key + ": expected an integer seed");
      return;
    }
    *dst = v->get<uint64_t>();
  }

  void u64list(const char* key, std::vector<uint64_t>* dst) {
    const nlohmann::json* v;
    if (!grab(key, &v)) return;
    if (!v->is_array()) {
      issues.errors.push_back(path + key + ": expected an array of seeds");
      return;
    }
    dst->clear();
    for (const auto& e : *v) dst->push_back(e.get<uint64_t>());
  }

  void finish() {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!seen.count(it.key()))
        issues.warnings.push_back("unknown field " + path + it.key());
  }
};

void read_weights(const nlohmann::json& j, const std::string& path, LossWeights* w,
                  ConfigIssues& issues) {
  Reader r{j, path, issues, {}};
  r.num("recon", &w->recon, 0.0, 1e6);
  r.num("cyc", &w->cyc, 0.0, 1e6);
  r.num("control", &w->control, 0.0, 1e6);
  r.num("cycControl", &w->cyc_control, 0.0, 1e6);
  r.num("lsganG", &w->lsgan_g, 0.0, 1e6);
  r.num("perceptual", &w->perceptual, 0.0, 1e6);
  r.num("zRecon", &w->z_recon, 0.0, 1e6);
  r.finish();
  double sum = w->recon + w->cyc + w->control + w->cyc_control + w->lsgan_g + w->perceptual +
               w->z_recon;
  if (sum <= 0.0) issues.errors.push_back(path + ": all weights zero");
}

nlohmann::json weights_to_json(const LossWeights& w) {
  return {{"recon", w.recon},   {"cyc", w.cyc},
          {"control", w.control}, {"cycControl", w.cyc_control},
          {"lsganG", w.lsgan_g},  {"perceptual", w.perceptual},
          {"zRecon", w.z_recon}};
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j, ConfigIssues& issues) {
  ExperimentConfig cfg = default_config();
  if (!j.is_object()) {
    issues.errors.push_back("config root must be an object");
    return cfg;
  }
  if (j.value("format", "") != "expcfg/1")
    issues.errors.push_back("format: expected \"expcfg/1\"");

  Reader root{j, "", issues, {}};
  root.seen.insert("format");
  root.u64("masterSeed", &cfg.master_seed);

  const nlohmann::json* sec;
  if (root.grab("world", &sec)) {
    Reader r{*sec, "world.", issues, {}};
    r.num("length", &cfg.road.length, 50.0, 5000.0);
    r.num("step", &cfg.road.step, 1.0, 100.0);
    r.num("kappaGain", &cfg.road.kappa_gain, 0.0, 1.0);
    r.num("frequency", &cfg.road.frequency, 1e-4, 1.0);
    r.num("ds", &cfg.road.ds, 0.01, 10.0);
    r.num("laneWidth", &cfg.lane_width, 1.0, 20.0);
    r.finish();
  }

  if (root.grab("camera", &sec)) {
    Reader r{*sec, "camera.", issues, {}};
    int w = cfg.camera.width, h = cfg.camera.height;
    double hfov = 100.0, height_m = cfg.camera.height_m, pitch = cfg.camera.pitch,
           forward = cfg.camera.forward_m;
    r.num("width", &w, 8, 1024);
    r.num("height", &h, 8, 1024);
    r.num("hfovDeg", &hfov, 20.0, 160.0);
    r.num("heightM", &height_m, 0.2, 5.0);
    r.num("pitch", &pitch, 0.0, 1.2);
    r.num("forwardM", &forward, -2.0, 5.0);
    r.finish();
    if (w % 4 || h % 4)
      issues.errors.push_back("camera: width and height must be divisible by 4");
    if (issues.ok()) {
      cfg.camera = Camera::standard(w, h);
      double fx = (w / 2.0) / std::tan(hfov * 3.14159265358979323846 / 360.0);
      cfg.camera.fx = fx;
      cfg.camera.fy = fx;
      cfg.camera.height_m = height_m;
      cfg.camera.pitch = pitch;
      cfg.camera.forward_m = forward;
    }
  }

  if (root.grab("data", &sec)) {
    Reader r{*sec, "data.", issues, {}};
    r.num("framesPerDomain", &cfg.frames_per_domain, 8, 10000000);
    r.num("maxEpisodes", &cfg.max_episodes, 1, 1000000);
    r.num("trainFrac", &cfg.train_frac, 0.0, 1.0, true);
    r.num("valFrac", &cfg.val_frac, 0.0, 1.0);
    r.num("ouTheta", &cfg.episode.ou_theta, 0.0, 19.0);
    r.num("ouSigma", &cfg.episode.ou_sigma, 0.0, 10.0);
    r.num("maxSteps", &cfg.episode.max_steps, 10, 1000000);
    const nlohmann::json* bins;
    if (r.grab("bins", &bins)) {
      auto want = BinSpec::edges();
      bool bad = !bins->is_array() || bins->size() != want.size();
      if (!bad) {
        std::vector<double> got = bins->get<std::vector<double>>();
        for (size_t i = 0; i + 1 < got.size(); ++i)
          if (got[i] >= got[i + 1]) {
            issues.errors.push_back("data.bins: edges must be strictly increasing");
            bad = true;
            break;
          }
        if (!bad)
          for (size_t i = 0; i < got.size(); ++i)
            if (got[i] != want[i]) {
              bad = true;
              issues.errors.push_back(
                  "data.bins: only the built-in eight-bin layout is supported");
              break;
            }
      } else {
        issues.errors.push_back("data.bins: expected 9 edges");
      }
    }
    r.finish();
    if (cfg.train_frac + cfg.val_frac > 1.0)
      issues.errors.push_back("data: trainFrac + valFrac exceed 1");
    if (cfg.episode.ou_theta * cfg.episode.vehicle.dt >= 2.0)
      issues.errors.push_back("data.ouTheta: unstable for the simulation step");
  }

  if (root.grab("model", &sec)) {
    Reader r{*sec, "model.", issues, {}};
    r.num("baseChannels", &cfg.model.base_channels, 1, 256);
    r.num("discChannels", &cfg.model.disc_channels, 1, 256);
    r.num("ctrlChannels", &cfg.model.ctrl_channels, 1, 1024);
    r.num("ctrlFc", &cfg.model.ctrl_fc, 1, 4096);
    r.num("percChannels", &cfg.model.perc_channels, 1, 256);
    r.num("leakySlope", &cfg.model.leaky_slope, 0.0, 1.0);
    r.finish();
  }

  if (root.grab("train", &sec)) {
    Reader r{*sec, "train.", issues, {}};
    r.num("batchSize", &cfg.train.batch_size, 1, 4096);
    r.num("iterations", &cfg.train.iterations, 0, 100000000);
    r.num("adamLr", &cfg.train.adam_lr, 0.0, 1.0, true);
    r.num("adamBeta1", &cfg.train.adam_beta1, 0.0, 0.9999);
    r.num("adamBeta2", &cfg.train.adam_beta2, 0.0, 0.9999);
    r.num("sgdLr", &cfg.train.sgd_lr, 0.0, 10.0, true);
    r.num("logEvery", &cfg.train.log_every, 0, 1000000);
    r.num("checkpointEvery", &cfg.train.checkpoint_every, 0, 100000000);
    r.u64list("seeds", &cfg.train_seeds);
    const nlohmann::json* w;
    if (r.grab("weights", &w)) read_weights(*w, "train.weights.", &cfg.train.weights, issues);
    r.finish();
    if (cfg.train_seeds.empty()) issues.errors.push_back("train.seeds: empty");
  }

  if (root.grab("eval", &sec)) {
    Reader r{*sec, "eval.", issues, {}};
    r.num("closedWorlds", &cfg.closed_worlds, 1, 10000);
    r.num("maxMeters", &cfg.eval.max_meters, 10.0, 1000000.0);
    r.num("margin", &cfg.eval.margin, 0.0, 10.0);
    r.num("earlyStopMeters", &cfg.eval.early_stop_meters, 0.0, 1000000.0);
    r.num("earlyStopRate", &cfg.eval.early_stop_rate, 0.0, 1000000.0);
    r.num("maxStepsPerWorld", &cfg.eval.max_steps_per_world, 10, 10000000);
    r.finish();
  }

  if (root.grab("baselines", &sec)) {
    cfg.baselines.clear();
    if (!sec->is_array()) {
      issues.errors.push_back("baselines: expected an array of policy names");
    } else {
      for (const auto& e : *sec) {
        try {
          cfg.baselines.push_back(policy_kind_from_name(e.get<std::string>()));
        } catch (const std::exception& ex) {
          issues.errors.push_back(std::string("baselines: ") + ex.what());
        }
      }
    }
  }

  if (root.grab("ablations", &sec)) {
    Reader r{*sec, "ablations.", issues, {}};
    const nlohmann::json* modes;
    if (r.grab("modes", &modes)) {
      cfg.ablation_modes.clear();
      for (const auto& e : *modes) {
        try {
          cfg.ablation_modes.push_back(ablation_from_name(e.get<std::string>()));
        } catch (const std::exception& ex) {
          issues.errors.push_back(std::string("ablations.modes: ") + ex.what());
        }
      }
    }
    r.u64list("seeds", &cfg.ablation_seeds);
    r.finish();
  }

  root.finish();
  cfg.finalize();
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["format"] = "expcfg/1";
  j["masterSeed"] = cfg.master_seed;
  j["world"] = {{"length", cfg.road.length},       {"step", cfg.road.step},
                {"kappaGain", cfg.road.kappa_gain}, {"frequency", cfg.road.frequency},
                {"ds", cfg.road.ds},                {"laneWidth", cfg.lane_width}};
  double hfov = 2.0 * std::atan((cfg.camera.width / 2.0) / cfg.camera.fx) * 180.0 /
                3.14159265358979323846;
  j["camera"] = {{"width", cfg.camera.width},    {"height", cfg.camera.height},
                 {"hfovDeg", hfov},              {"heightM", cfg.camera.height_m},
                 {"pitch", cfg.camera.pitch},    {"forwardM", cfg.camera.forward_m}};
  j["data"] = {{"framesPerDomain", cfg.frames_per_domain},
               {"maxEpisodes", cfg.max_episodes},
               {"trainFrac", cfg.train_frac},
               {"valFrac", cfg.val_frac},
               {"ouTheta", cfg.episode.ou_theta},
               {"ouSigma", cfg.episode.ou_sigma},
               {"maxSteps", cfg.episode.max_steps},
               {"bins", BinSpec::edges()}};
  j["model"] = model_config_to_json(cfg.model);
  j["train"] = {{"batchSize", cfg.train.batch_size},
                {"iterations", cfg.train.iterations},
                {"adamLr", cfg.train.adam_lr},
                {"adamBeta1", cfg.train.adam_beta1},
                {"adamBeta2", cfg.train.adam_beta2},
                {"sgdLr", cfg.train.sgd_lr},
                {"logEvery", cfg.train.log_every},
                {"checkpointEvery", cfg.train.checkpoint_every},
                {"seeds", cfg.train_seeds},
                {"weights", weights_to_json(cfg.train.weights)}};
  j["eval"] = {{"closedWorlds", cfg.closed_worlds},
               {"maxMeters", cfg.eval.max_meters},
               {"margin", cfg.eval.margin},
               {"earlyStopMeters", cfg.eval.early_stop_meters},
               {"earlyStopRate", cfg.eval.early_stop_rate},
               {"maxStepsPerWorld", cfg.eval.max_steps_per_world}};
  nlohmann::json bl = nlohmann::json::array();
  for (PolicyKind k : cfg.baselines) bl.push_back(policy_kind_name(k));
  j["baselines"] = bl;
  nlohmann::json modes = nlohmann::json::array();
  for (AblationMode m : cfg.ablation_modes) modes.push_back(ablation_name(m));
  j["ablations"] = {{"modes", modes}, {"seeds", cfg.ablation_seeds}};
  return j;
}

ExperimentConfig load_config(const std::string& path, ConfigIssues& issues) {
  std::ifstream in(path);
  if (!in) {
    issues.errors.push_back("cannot open config " + path);
    return default_config();
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    issues.errors.push_back(std::string("config parse: ") + ex.what());
    return default_config();
  }
  return config_from_json(j, issues);
}

}  // namespace simgap
