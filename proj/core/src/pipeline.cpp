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

#include "simgap/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "simgap/baselines.hpp"
#include "simgap/hash.hpp"

namespace simgap {

namespace fs = std::filesystem;

namespace {

struct StageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_json(const std::string& path, const nlohmann::json& j) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

std::string seed_dir(const std::string& base, uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "/seed%llu", static_cast<unsigned long long>(seed));
  return base + buf;
}

/// Shared context threaded through the stages.
struct Run {
  const ExperimentConfig& cfg;
  const PipelineOptions& opt;
  std::ostringstream log;

  Dataset sim_ds, target_ds;
  PixelCache sim_cache, target_cache;
  EpisodeSplit sim_split, target_split;
  std::vector<int> sim_train_frames, sim_test_frames;
  std::vector<int> target_train_frames, target_test_frames;
  std::vector<int> sim_plan;
  std::vector<uint64_t> eval_world_seeds;

  Run(const ExperimentConfig& c, const PipelineOptions& o) : cfg(c), opt(o) {}

  std::string out(const std::string& rel) const { return opt.out_dir + "/" + rel; }
  bool have(const std::string& path) const {
    return opt.reuse_existing && fs::exists(path);
  }
  void note(const std::string& msg) {
    log << msg << "\n";
    if (!opt.quiet) std::printf("%s\n", msg.c_str());
  }
};

void stage_gen(Run& r) {
  fs::create_directories(r.out("worlds"));
  r.eval_world_seeds.clear();
  for (int i = 0; i < r.cfg.closed_worlds; ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "worlds/eval_%02d.json", i);
    uint64_t seed = derive_seed(r.cfg.master_seed, "eval:world:" + std::to_string(i));
    r.eval_world_seeds.push_back(seed);
    std::string path = r.out(name);
    if (r.have(path)) continue;
    World w = generate_world(r.cfg.road, r.cfg.lane_width, seed);
    save_world(w, path);
  }
  r.note("gen: " + std::to_string(r.cfg.closed_worlds) + " eval worlds");
}

Dataset stage_collect(Run& r, const char* domain, RenderStyle style) {
  std::string dir = r.out(std::string("data/") + domain);
  if (r.have(dir + "/manifest.json")) {
    r.note(std::string("collect:") + domain + ": reusing " + dir);
    return load_dataset(dir);
  }
  CollectParams p;
  p.road = r.cfg.road;
  p.lane_width = r.cfg.lane_width;
  p.episode = r.cfg.episode;
  p.camera = r.cfg.camera;
  p.style = style;
  p.target_frames = r.cfg.frames_per_domain;
  p.max_episodes = r.cfg.max_episodes;
  Dataset ds =
      collect_dataset(p, derive_seed(r.cfg.master_seed, std::string("collect:") + domain), dir);
  r.note(std::string("collect:") + domain + ": " + std::to_string(ds.frames.size()) +
         " frames over " + std::to_string(ds.episode_count()) + " episodes");
  return ds;
}

void stage_balance(Run& r) {
  r.sim_split = split_episodes(r.sim_ds.episode_count(), r.cfg.train_frac, r.cfg.val_frac,
                               derive_seed(r.cfg.master_seed, "split:sim"));
  r.target_split = split_episodes(r.target_ds.episode_count(), r.cfg.train_frac, r.cfg.val_frac,
                                  derive_seed(r.cfg.master_seed, "split:target"));
  r.sim_train_frames = frames_of_episodes(r.sim_ds, r.sim_split.train);
  r.sim_test_frames = frames_of_episodes(r.sim_ds, r.sim_split.test);
  r.target_train_frames = frames_of_episodes(r.target_ds, r.target_split.train);
  r.target_test_frames = frames_of_episodes(r.target_ds, r.target_split.test);

  std::vector<double> labels;
  labels.reserve(r.sim_train_frames.size());
  for (int idx : r.sim_train_frames)
    labels.push_back(r.sim_ds.frames[static_cast<size_t>(idx)].steering);
  r.sim_plan = balanced_index_plan(labels, derive_seed(r.cfg.master_seed, "balance:sim"));

  std::vector<double> planned;
  planned.reserve(r.sim_plan.size());
  for (int p : r.sim_plan) planned.push_back(labels[static_cast<size_t>(p)]);
  nlohmann::json j;
  j["format"] = "balance/1";
  j["simTrainEpisodes"] = r.sim_split.train;
  j["simTestEpisodes"] = r.sim_split.test;
  j["targetTrainEpisodes"] = r.target_split.train;
  j["targetTestEpisodes"] = r.target_split.test;
  j["plan"] = r.sim_plan;
  j["histogramBefore"] = bin_histogram(labels);
  j["histogramAfter"] = bin_histogram(planned);
  write_json(r.out("balance/plan.json"), j);
  r.note("balance: " + std::to_string(labels.size()) + " train labels -> plan of " +
         std::to_string(r.sim_plan.size()));
}

TrainData train_data_of(Run& r) {
  TrainData d;
  d.sim = &r.sim_ds;
  d.sim_cache = &r.sim_cache;
  d.sim_frames = r.sim_train_frames;
  d.sim_plan = r.sim_plan;
  d.target = &r.target_ds;
  d.target_cache = &r.target_cache;
  d.target_frames = r.target_train_frames;
  return d;
}

void stage_train(Run& r) {
  TrainData data = train_data_of(r);
  for (uint64_t seed : r.cfg.train_seeds) {
    std::string dir = r.out("train") + seed_dir("", seed);
    if (r.have(dir + "/final.ckpt")) {
      r.note("train: reusing " + dir);
      continue;
    }
    TrainConfig tc = r.cfg.train;
    tc.seed = seed;
    train(tc, data, dir);
    r.note("train: seed " + std::to_string(seed) + " done");
  }
}

bool wants(const Run& r, PolicyKind k) {
  for (PolicyKind b : r.cfg.baselines)
    if (b == k) return true;
  return false;
}

void stage_baselines(Run& r) {
  bool need_bc = wants(r, PolicyKind::kSimpleTransfer) || wants(r, PolicyKind::kRealToSim);
  TrainData data = train_data_of(r);
  for (uint64_t seed : r.cfg.train_seeds) {
    if (need_bc) {
      std::string dir = r.out("baselines/bc") + seed_dir("", seed);
      if (!r.have(dir + "/final.ckpt")) {
        TrainConfig tc = r.cfg.train;
        tc.seed = seed;
        train_bc(tc, r.sim_ds, r.sim_cache, r.sim_train_frames, r.sim_plan, dir);
        r.note("baselines: bc seed " + std::to_string(seed) + " done");
      }
    }
    if (wants(r, PolicyKind::kSimToReal)) {
      std::string dir = r.out("baselines/s2r") + seed_dir("", seed);
      if (!r.have(dir + "/final.ckpt")) {
        TrainConfig tc = r.cfg.train;
        tc.seed = seed;
        TransferModel full = load_model_from_checkpoint(
            r.out("train") + seed_dir("", seed) + "/final.ckpt", r.cfg.model);
        train_sim_to_real(tc, full, r.sim_ds, r.sim_cache, dir + "/translated", dir);
        r.note("baselines: s2r seed " + std::to_string(seed) + " done");
      }
    }
    if (wants(r, PolicyKind::kLatentAda)) {
      std::string dir = r.out("baselines/ada") + seed_dir("", seed);
      if (!r.have(dir + "/final.ckpt")) {
        TrainConfig tc = r.cfg.train;
        tc.seed = seed;
        train_ada(tc, AdaConfig{}, data, dir);
        r.note("baselines: ada seed " + std::to_string(seed) + " done");
      }
    }
  }
}

std::vector<double> labels_of(const Dataset& ds, const std::vector<int>& frames) {
  std::vector<double> labels;
  labels.reserve(frames.size());
  for (int idx : frames) labels.push_back(ds.frames[static_cast<size_t>(idx)].steering);
  return labels;
}

std::unique_ptr<Policy> policy_for(Run& r, PolicyKind kind, uint64_t seed) {
  BaselineArtifacts a;
  auto load = [&](const std::string& dir) {
    return std::make_shared<TransferModel>(
        load_model_from_checkpoint(dir + "/final.ckpt", r.cfg.model));
  };
  switch (kind) {
    case PolicyKind::kDriveStraight: break;
    case PolicyKind::kFullModel:
      a.full = load(r.out("train") + seed_dir("", seed));
      break;
    case PolicyKind::kSimpleTransfer:
      a.bc = load(r.out("baselines/bc") + seed_dir("", seed));
      break;
    case PolicyKind::kRealToSim:
      a.full = load(r.out("train") + seed_dir("", seed));
      a.bc = load(r.out("baselines/bc") + seed_dir("", seed));
      break;
    case PolicyKind::kSimToReal:
      a.s2r = load(r.out("baselines/s2r") + seed_dir("", seed));
      break;
    case PolicyKind::kLatentAda:
      a.ada = load(r.out("baselines/ada") + seed_dir("", seed));
      break;
  }
  return make_baseline(kind, a);
}

std::string report_path(Run& r, PolicyKind kind, uint64_t seed) {
  std::string name = policy_kind_name(kind);
  if (kind != PolicyKind::kDriveStraight) name += "_seed" + std::to_string(seed);
  return r.out("eval/" + name + ".json");
}

/// Seeds that matter for a policy: drive-straight has no trained state, so it
/// is evaluated once.
std::vector<uint64_t> seeds_for(Run& r, PolicyKind kind) {
  if (kind == PolicyKind::kDriveStraight) return {r.cfg.train_seeds.front()};
  return r.cfg.train_seeds;
}

std::vector<PolicyKind> eval_kinds(Run& r) {
  std::vector<PolicyKind> kinds = {PolicyKind::kFullModel};
  for (PolicyKind k : r.cfg.baselines) kinds.push_back(k);
  return kinds;
}

void stage_eval_open(Run& r) {
  std::vector<double> sim_labels = labels_of(r.sim_ds, r.sim_test_frames);
  std::vector<double> target_labels = labels_of(r.target_ds, r.target_test_frames);
  for (PolicyKind kind : eval_kinds(r)) {
    for (uint64_t seed : seeds_for(r, kind)) {
      std::string path = report_path(r, kind, seed);
      if (r.have(path)) continue;
      auto policy = policy_for(r, kind, seed);
      EvalReport rep;
      rep.policy = policy->name();
      rep.checkpoint = kind == PolicyKind::kDriveStraight
                           ? ""
                           : "seed" + std::to_string(seed);
      rep.has_open_sim = true;
      rep.open_sim = open_loop_eval(
          predict_dataset(*policy, r.sim_ds, r.sim_test_frames, r.sim_cache), sim_labels);
      rep.has_open_target = true;
      rep.open_target = open_loop_eval(
          predict_dataset(*policy, r.target_ds, r.target_test_frames, r.target_cache),
          target_labels);
      write_json(path, report_to_json(rep));
      char line[160];
      std::snprintf(line, sizeof(line), "eval-open: %s sim %.4f/%.4f target %.4f/%.4f",
                    fs::path(path).stem().string().c_str(), rep.open_sim.mae,
                    rep.open_sim.balanced_mae, rep.open_target.mae,
                    rep.open_target.balanced_mae);
      r.note(line);
    }
  }
}

void stage_eval_closed(Run& r) {
  for (PolicyKind kind : eval_kinds(r)) {
    for (uint64_t seed : seeds_for(r, kind)) {
      std::string path = report_path(r, kind, seed);
      EvalReport rep = report_from_json(read_json(path));
      if (rep.has_closed && r.opt.reuse_existing) continue;
      auto policy = policy_for(r, kind, seed);
      rep.has_closed = true;
      rep.closed =
          closed_loop(*policy, r.eval_world_seeds, RenderStyle::kTargetProxy, r.cfg.eval);
      write_json(path, report_to_json(rep));
      char line[160];
      std::snprintf(line, sizeof(line), "eval-closed: %s %.1f m/intervention (%d over %.0f m)",
                    fs::path(path).stem().string().c_str(), rep.closed.meters_per_intervention,
                    rep.closed.interventions, rep.closed.total_meters);
      r.note(line);
    }
  }
}

void stage_ablate(Run& r) {
  if (r.cfg.ablation_modes.empty()) return;
  std::vector<uint64_t> seeds =
      r.cfg.ablation_seeds.empty() ? r.cfg.train_seeds : r.cfg.ablation_seeds;
  std::vector<std::string> baseline_ckpts;
  bool reuse_base = true;
  for (uint64_t s : seeds) {
    std::string ckpt = r.out("train") + seed_dir("", s) + "/final.ckpt";
    if (!fs::exists(ckpt)) reuse_base = false;
    baseline_ckpts.push_back(ckpt);
  }
  if (!reuse_base) baseline_ckpts.clear();
  TrainData data = train_data_of(r);
  TrainConfig tc = r.cfg.train;
  AblationSuiteResult res = run_ablation_suite(
      tc, data, r.target_ds, r.target_test_frames, r.target_cache, seeds, r.cfg.ablation_modes,
      r.out("ablate"), baseline_ckpts, r.opt.reuse_existing);
  write_json(r.out("ablate/summary.json"), ablation_suite_to_json(res));
  for (const auto& row : res.rows) {
    char line[160];
    std::snprintf(line, sizeof(line), "ablate: %s multiplier %.3f (mae) / %.3f (balanced)",
                  ablation_name(row.mode), row.mae_multiplier, row.bmae_multiplier);
    r.note(line);
  }
}

void stage_report(Run& r) {
  std::vector<EvalReport> reports;
  for (PolicyKind kind : eval_kinds(r))
    for (uint64_t seed : seeds_for(r, kind)) {
      std::string path = report_path(r, kind, seed);
      if (fs::exists(path)) reports.push_back(report_from_json(read_json(path)));
    }
  std::string table = report_table(reports);
  std::ofstream out(r.out("eval/table.txt"), std::ios::trunc);
  out << table;
  if (!r.opt.quiet) std::printf("%s", table.c_str());
}

void stage_manifest(Run& r) {
  nlohmann::json files;
  std::vector<std::string> rels;
  for (auto it = fs::recursive_directory_iterator(r.opt.out_dir);
       it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file()) continue;
    std::string rel = fs::relative(it->path(), r.opt.out_dir).generic_string();
    if (rel == "manifest.json") continue;
    rels.push_back(rel);
  }
  std::sort(rels.begin(), rels.end());
  for (const auto& rel : rels)
    files[rel] = sha256_file((fs::path(r.opt.out_dir) / rel).string());
  nlohmann::json j;
  j["format"] = "runmanifest/1";
  j["masterSeed"] = r.cfg.master_seed;
  j["files"] = files;
  write_json(r.out("manifest.json"), j);
  r.note("manifest: " + std::to_string(rels.size()) + " files hashed");
}

struct CheckOutcome {
  bool pass = true;
  std::ostringstream text;

  void require(bool ok, const std::string& what) {
    text << (ok ? "  pass: " : "  FAIL: ") << what << "\n";
    pass = pass && ok;
  }
};

void check_transfer(Run& r, CheckOutcome& c) {
  size_t n = r.cfg.train_seeds.size();
  size_t need = n - n / 3;  // 2 of 3 at the default seed count
  auto read_report = [&](PolicyKind kind, uint64_t seed) {
    return report_from_json(read_json(report_path(r, kind, seed)));
  };
  EvalReport ds = read_report(PolicyKind::kDriveStraight, r.cfg.train_seeds.front());

  size_t a = 0, b = 0, cwins = 0;
  for (uint64_t seed : r.cfg.train_seeds) {
    EvalReport full = read_report(PolicyKind::kFullModel, seed);
    EvalReport st = read_report(PolicyKind::kSimpleTransfer, seed);
    if (full.open_target.balanced_mae < ds.open_target.balanced_mae &&
        full.open_target.balanced_mae < st.open_target.balanced_mae)
      ++a;
    if (full.has_closed && ds.has_closed && st.has_closed &&
        full.closed.meters_per_intervention >= 3.0 * ds.closed.meters_per_intervention &&
        full.closed.meters_per_intervention >= 5.0 * st.closed.meters_per_intervention)
      ++b;
    if (full.open_sim.mae < ds.open_sim.mae) ++cwins;
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "target balanced-MAE: full beats drive-straight and simple-transfer for %zu/%zu"
                " seeds (need %zu)",
                a, n, need);
  c.require(a >= need, buf);
  std::snprintf(buf, sizeof(buf),
                "closed loop: full >= 3x drive-straight and 5x simple-transfer for %zu/%zu seeds"
                " (need %zu)",
                b, n, need);
  c.require(b >= need, buf);
  std::snprintf(buf, sizeof(buf), "sim MAE: full beats drive-straight for %zu/%zu seeds (need %zu)",
                cwins, n, need);
  c.require(cwins >= need, buf);
}

void check_ablations(Run& r, CheckOutcome& c) {
  std::string path = r.out("ablate/summary.json");
  if (!fs::exists(path)) {
    c.require(false, "ablation summary missing (run with ablations enabled)");
    return;
  }
  nlohmann::json j = read_json(path);
  auto multiplier = [&](const std::string& mode) -> double {
    for (const auto& row : j.at("rows"))
      if (row.at("mode") == mode) return row.at("balancedMaeMultiplier").get<double>();
    throw StageError("ablation row missing: " + mode);
  };
  auto check_mode = [&](const std::string& mode, double threshold) {
    double m = multiplier(mode);
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%s balanced-MAE multiplier %.3f > %.1f", mode.c_str(), m,
                  threshold);
    c.require(m > threshold, buf);
  };
  check_mode("drop_cyc", 1.2);
  check_mode("drop_gan", 1.2);
  check_mode("stethoscope", 1.0);
}

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& cfg, const PipelineOptions& opt) {
  Run r(cfg, opt);
  PipelineResult result;
  std::string stage = "init";
  auto stop_after = [&](const char* name) { return opt.until == name; };
  try {
    fs::create_directories(opt.out_dir);
    write_json(r.out("config.json"), config_to_json(cfg));

    stage = "gen";
    stage_gen(r);
    if (stop_after("gen")) return result;
    stage = "collect:sim";
    r.sim_ds = stage_collect(r, "sim", RenderStyle::kSim);
    stage = "collect:target";
    r.target_ds = stage_collect(r, "target", RenderStyle::kTargetProxy);
    if (stop_after("collect")) return result;
    stage = "balance";
    r.sim_cache = load_pixel_cache(r.sim_ds);
    r.target_cache = load_pixel_cache(r.target_ds);
    stage_balance(r);
    if (stop_after("balance")) return result;
    stage = "train";
    stage_train(r);
    if (stop_after("train")) return result;
    stage = "baselines";
    stage_baselines(r);
    if (stop_after("baselines")) return result;
    stage = "eval-open";
    stage_eval_open(r);
    if (stop_after("eval-open")) return result;
    stage = "eval-closed";
    stage_eval_closed(r);
    if (stop_after("eval-closed")) return result;
    if (opt.run_ablations) {
      stage = "ablate";
      stage_ablate(r);
      if (stop_after("ablate")) return result;
    }
    stage = "report";
    stage_report(r);
    if (stop_after("report")) return result;
    stage = "manifest";
    stage_manifest(r);
  } catch (const std::exception& ex) {
    result.exit_code = 3;
    result.summary = "stage " + stage + " failed: " + ex.what();
    return result;
  }

  if (opt.check) {
    CheckOutcome c;
    std::string stage2 = "check";
    try {
      c.text << "transfer orderings:\n";
      check_transfer(r, c);
      if (opt.run_ablations || fs::exists(r.out("ablate/summary.json"))) {
        c.text << "ablation directions:\n";
        check_ablations(r, c);
      }
    } catch (const std::exception& ex) {
      result.exit_code = 3;
      result.summary = "stage " + stage2 + " failed: " + ex.what();
      return result;
    }
    result.summary = c.text.str();
    if (!c.pass) result.exit_code = 4;
    if (!opt.quiet) std::printf("%s", result.summary.c_str());
  }
  return result;
}

PipelineResult check_pipeline(const ExperimentConfig& cfg, const std::string& out_dir) {
  PipelineOptions opt;
  opt.out_dir = out_dir;
  Run r(cfg, opt);
  PipelineResult result;
  CheckOutcome c;
  try {
    c.text << "transfer orderings:\n";
    check_transfer(r, c);
    if (fs::exists(r.out("ablate/summary.json"))) {
      c.text << "ablation directions:\n";
      check_ablations(r, c);
    }
  } catch (const std::exception& ex) {
    result.exit_code = 3;
    result.summary = std::string("check failed to read artifacts: ") + ex.what();
    return result;
  }
  result.summary = c.text.str();
  if (!c.pass) result.exit_code = 4;
  return result;
}

}  // namespace simgap
