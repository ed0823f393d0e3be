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

#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "simgap/blas.hpp"
#include "simgap/checkpoint.hpp"
#include "simgap/image.hpp"
#include "simgap/pipeline.hpp"
#include "simgap/render.hpp"
#include "simgap/world.hpp"

namespace {

using namespace simgap;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kStageError = 3;
constexpr int kCheckFailed = 4;

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct Common {
  std::string config_path;
  std::string out_dir = env_or("SIMGAP_OUT", "out");
  int threads = std::atoi(env_or("SIMGAP_THREADS", "1").c_str());
  bool quiet = false;
};

int load_cfg(const Common& c, ExperimentConfig* cfg) {
  if (c.config_path.empty()) {
    *cfg = default_config();
    return kOk;
  }
  ConfigIssues issues;
  *cfg = load_config(c.config_path, issues);
  for (const auto& w : issues.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!issues.ok()) {
    std::fprintf(stderr, "%s: invalid config\n%s", c.config_path.c_str(),
                 issues.joined().c_str());
    return kConfigError;
  }
  return kOk;
}

int run_stages(const Common& c, const std::string& until, bool ablations, bool reuse, bool check) {
  ExperimentConfig cfg;
  if (int rc = load_cfg(c, &cfg)) return rc;
  PipelineOptions opt;
  opt.out_dir = c.out_dir;
  opt.until = until;
  opt.run_ablations = ablations;
  opt.reuse_existing = reuse;
  opt.check = check;
  opt.quiet = c.quiet;
  PipelineResult res = run_pipeline(cfg, opt);
  if (res.exit_code != 0) std::fprintf(stderr, "%s\n", res.summary.c_str());
  return res.exit_code;
}

int cmd_gen_world(const Common& c, uint64_t seed, const std::string& out_file) {
  ExperimentConfig cfg;
  if (int rc = load_cfg(c, &cfg)) return rc;
  try {
    World w = generate_world(cfg.road, cfg.lane_width, seed);
    save_world(w, out_file);
    if (!c.quiet)
      std::printf("world seed %llu: %.0f m centerline, %zu foliage -> %s\n",
                  (unsigned long long)seed, w.centerline.length(), w.foliage.size(),
                  out_file.c_str());
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "gen-world failed: %s\n", ex.what());
    return kStageError;
  }
  return kOk;
}

int cmd_render_preview(const Common& c, const std::string& world_file, double s,
                       const std::string& style_name, uint64_t noise_seed,
                       const std::string& out_file) {
  ExperimentConfig cfg;
  if (int rc = load_cfg(c, &cfg)) return rc;
  try {
    World w = load_world(world_file);
    RenderStyle style = render_style_from_name(style_name);
    if (s < 0.0 || s > w.centerline.length()) throw std::runtime_error("s outside centerline");
    Vec2 pos = w.centerline.position(s);
    double heading = w.centerline.heading(s);
    Rng rng(derive_seed(noise_seed, "preview"));
    Image img = render_view(w, cfg.camera, pos, heading, style,
                            style == RenderStyle::kTargetProxy ? &rng : nullptr);
    write_png(out_file, img);
    if (!c.quiet)
      std::printf("%s at s=%.1f (%s) -> %s\n", world_file.c_str(), s, style_name.c_str(),
                  out_file.c_str());
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "render-preview failed: %s\n", ex.what());
    return kStageError;
  }
  return kOk;
}

int cmd_model_info(const std::string& ckpt) {
  try {
    nlohmann::json info = read_checkpoint_meta(ckpt);
    std::printf("%s\n", info.dump(2).c_str());
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "model-info failed: %s\n", ex.what());
    return kStageError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procedural driving worlds, unsupervised style transfer, and a steering policy"
               " trained only on source-domain labels. Stage subcommands extend an output tree"
               " under --out, reusing whatever is already there."};
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--config", c.config_path, "Experiment config (expcfg/1 JSON); built-in default"
                 " when omitted");
  app.add_option("--out", c.out_dir, "Output tree root (env SIMGAP_OUT)");
  app.add_option("--threads", c.threads, "BLAS threads; 1 keeps runs bit-reproducible"
                 " (env SIMGAP_THREADS)");
  app.add_flag("--quiet", c.quiet, "Suppress progress lines");

  uint64_t world_seed = 1;
  std::string world_out = "world.json";
  auto* gen = app.add_subcommand("gen-world", "Generate one procedural world to a file");
  gen->add_option("--seed", world_seed, "World seed");
  gen->add_option("--out-file", world_out, "Destination worldspec JSON");

  std::string preview_world, preview_style = "sim", preview_out = "preview.png";
  double preview_s = 5.0;
  uint64_t preview_noise = 1;
  auto* prev = app.add_subcommand("render-preview", "Render the view from a point on a world's"
                                  " centerline");
  prev->add_option("--world", preview_world, "Worldspec JSON")->required();
  prev->add_option("--s", preview_s, "Arc length along the centerline, metres");
  prev->add_option("--style", preview_style, "sim or targetproxy");
  prev->add_option("--noise-seed", preview_noise, "Seed for target-style sensor noise");
  prev->add_option("--out-file", preview_out, "Destination PNG");

  auto* collect = app.add_subcommand("collect", "Drive the noisy expert and record both domains'"
                                     " datasets");
  auto* balance = app.add_subcommand("balance", "Split episodes and build the steering-balanced"
                                     " sampling plan");
  auto* train = app.add_subcommand("train", "Train the translation+control model for every"
                                   " configured seed");
  auto* eopen = app.add_subcommand("eval-open", "Score policies against held-out frames in both"
                                   " domains");
  auto* eclosed = app.add_subcommand("eval-closed", "Drive policies through unseen worlds and"
                                     " count interventions");
  auto* ablate = app.add_subcommand("ablate", "Retrain with individual loss terms removed and"
                                    " compare");
  auto* report = app.add_subcommand("report", "Assemble the evaluation table from existing"
                                    " reports");

  bool pipe_check = false, pipe_ablations = false, pipe_reuse = false;
  auto* pipe = app.add_subcommand("pipeline", "Run every stage end to end and write the run"
                                  " manifest");
  pipe->add_flag("--check", pipe_check, "Verify transfer/ablation orderings; exit 4 on failure");
  pipe->add_flag("--ablations", pipe_ablations, "Include the ablation campaign");
  pipe->add_flag("--reuse", pipe_reuse, "Skip stages whose outputs already exist");

  std::string info_ckpt;
  auto* info = app.add_subcommand("model-info", "Print a checkpoint's stores, shapes, and"
                                  " training meta");
  info->add_option("--ckpt", info_ckpt, "Checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  blas_set_threads(c.threads);

  if (gen->parsed()) return cmd_gen_world(c, world_seed, world_out);
  if (prev->parsed())
    return cmd_render_preview(c, preview_world, preview_s, preview_style, preview_noise,
                              preview_out);
  if (info->parsed()) return cmd_model_info(info_ckpt);

  // Stage subcommands reuse completed work; a fresh tree runs the needed
  // prefix of the pipeline.
  if (collect->parsed()) return run_stages(c, "collect", false, true, false);
  if (balance->parsed()) return run_stages(c, "balance", false, true, false);
  if (train->parsed()) return run_stages(c, "train", false, true, false);
  if (eopen->parsed()) return run_stages(c, "eval-open", false, true, false);
  if (eclosed->parsed()) return run_stages(c, "eval-closed", false, true, false);
  if (ablate->parsed()) return run_stages(c, "ablate", true, true, false);
  if (report->parsed()) return run_stages(c, "report", false, true, false);
  if (pipe->parsed()) return run_stages(c, "", pipe_ablations, pipe_reuse, pipe_check);

  return kConfigError;
}
