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

#include "simgap/baselines.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace simgap {

namespace {

std::vector<int> draw_picks(Rng& rng, size_t space, int count) {
  std::vector<int> picks(static_cast<size_t>(count));
  for (auto& p : picks) p = static_cast<int>(rng.uniform_int(space));
  return picks;
}

std::ofstream open_csv(const std::string& path, bool append, const char* header) {
  std::ofstream csv(path, append ? std::ios::app : std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot open " + path);
  if (!append) csv << header;
  return csv;
}

}  // namespace

TrainResult train_bc(const TrainConfig& cfg, const Dataset& ds, const PixelCache& cache,
                     const std::vector<int>& frames, const std::vector<int>& plan,
                     const std::string& out_dir, const std::string& resume_from) {
  if (plan.empty()) throw std::invalid_argument("train_bc: empty sampling plan");
  std::filesystem::create_directories(out_dir);
  TrainState st(cfg);
  if (!resume_from.empty()) st.load(resume_from);
  std::ofstream csv =
      open_csv(out_dir + "/loss.csv", !resume_from.empty(), "iteration,control\n");

  while (st.iteration < cfg.iterations) {
    std::vector<int> pos = draw_picks(st.rng_sim, plan.size(), cfg.batch_size);
    std::vector<int> picks;
    picks.reserve(pos.size());
    for (int p : pos) picks.push_back(plan[static_cast<size_t>(p)]);
    Tensor x = make_image_batch(cache, frames, picks);
    std::vector<float> labels = gather_labels(ds, frames, picks);

    TapeT<float> tape;
    ModelOps<float> ops(tape, st.model);
    auto xv = tape.constant(x);
    auto z = tape.add_noise(ops.encode(Domain::kSim, xv), st.rng_noise);
    auto c = ops.predict_control(z);
    Tensor label_t({static_cast<int>(labels.size()), 1});
    std::copy(labels.begin(), labels.end(), label_t.data.begin());
    auto loss = loss_control(tape, c, tape.constant(label_t));

    st.model.translator.zero_grads();
    st.model.ctrl.zero_grads();
    tape.backward(loss);
    st.adam_translator.step(st.model.translator);
    st.sgd_ctrl.step(st.model.ctrl);
    ++st.iteration;

    if (cfg.log_every > 0 &&
        (st.iteration % cfg.log_every == 0 || st.iteration == cfg.iterations)) {
      char line[64];
      std::snprintf(line, sizeof(line), "%lld,%.6f\n", static_cast<long long>(st.iteration),
                    static_cast<double>(tape.scalar(loss)));
      csv << line;
    }
    if (cfg.checkpoint_every > 0 && st.iteration % cfg.checkpoint_every == 0 &&
        st.iteration < cfg.iterations) {
      char name[64];
      std::snprintf(name, sizeof(name), "/ckpt_%06lld.ckpt",
                    static_cast<long long>(st.iteration));
      st.save(out_dir + name);
    }
  }
  csv.flush();

  TrainResult result;
  result.final_checkpoint = out_dir + "/final.ckpt";
  result.loss_csv = out_dir + "/loss.csv";
  st.save(result.final_checkpoint);
  return result;
}

Dataset translate_dataset(TransferModel& model, Domain from, Domain to, const Dataset& src,
                          const PixelCache& cache, const std::string& out_dir) {
  if (src.frames.size() != cache.frames.size())
    throw std::invalid_argument("translate_dataset: cache does not match dataset");
  Dataset out = src;
  out.root = out_dir;
  out.style = "translated";

  Image img;
  img.width = cache.width;
  img.height = cache.height;
  for (size_t i = 0; i < src.frames.size(); ++i) {
    img.pixels = cache.frames[i];
    TapeT<float> tape;
    ModelOps<float> ops(tape, model);
    Tensor t = image_to_tensor(img);
    t.shape = {1, t.dim(0), t.dim(1), t.dim(2)};
    auto y = ops.translate(from, to, tape.constant(t));
    Tensor yt = tape.val(y);
    yt.shape = {yt.dim(1), yt.dim(2), yt.dim(3)};
    Image translated = tensor_to_image(yt);

    std::filesystem::path dst = std::filesystem::path(out_dir) / src.frames[i].image_rel;
    std::filesystem::create_directories(dst.parent_path());
    write_png(dst.string(), translated);
  }
  save_manifest(out, out_dir + "/manifest.json");
  return out;
}

TrainResult train_sim_to_real(const TrainConfig& cfg, TransferModel& translator,
                              const Dataset& sim_ds, const PixelCache& sim_cache,
                              const std::string& translated_dir, const std::string& out_dir) {
  Dataset translated = translate_dataset(translator, Domain::kSim, Domain::kReal, sim_ds,
                                         sim_cache, translated_dir);
  PixelCache tcache = load_pixel_cache(translated);

  // Same split and balance discipline as the sim set: identical episodes and
  // labels give identical index plans.
  EpisodeSplit split = split_episodes(translated.episode_count(), 0.8, 0.0, cfg.seed);
  std::vector<int> frames = frames_of_episodes(translated, split.train);
  std::vector<double> labels;
  labels.reserve(frames.size());
  for (int idx : frames) labels.push_back(translated.frames[static_cast<size_t>(idx)].steering);
  std::vector<int> plan = balanced_index_plan(labels, cfg.seed);
  return train_bc(cfg, translated, tcache, frames, plan, out_dir);
}

TrainResult train_ada(const TrainConfig& cfg, const AdaConfig& ada, const TrainData& data,
                      const std::string& out_dir, const std::string& resume_from) {
  if (!data.sim || !data.sim_cache || !data.target || !data.target_cache)
    throw std::invalid_argument("train_ada: datasets not wired");
  if (data.sim_plan.empty() || data.target_frames.empty())
    throw std::invalid_argument("train_ada: empty sampling plan");
  std::filesystem::create_directories(out_dir);
  TrainState st(cfg);
  if (!resume_from.empty()) st.load(resume_from);
  std::ofstream csv = open_csv(out_dir + "/loss.csv", !resume_from.empty(),
                               "iteration,control,domain\n");

  while (st.iteration < cfg.iterations) {
    std::vector<int> pos = draw_picks(st.rng_sim, data.sim_plan.size(), cfg.batch_size);
    std::vector<int> sim_picks;
    sim_picks.reserve(pos.size());
    for (int p : pos) sim_picks.push_back(data.sim_plan[static_cast<size_t>(p)]);
    std::vector<int> tgt_picks =
        draw_picks(st.rng_target, data.target_frames.size(), cfg.batch_size);

    Tensor x_s = make_image_batch(*data.sim_cache, data.sim_frames, sim_picks);
    std::vector<float> labels = gather_labels(*data.sim, data.sim_frames, sim_picks);
    Tensor x_r = make_image_batch(*data.target_cache, data.target_frames, tgt_picks);

    TapeT<float> tape;
    ModelOps<float> ops(tape, st.model);
    // One shared encoder reads both domains; only the sim side has labels.
    auto z_s = tape.add_noise(ops.encode(Domain::kSim, tape.constant(x_s)), st.rng_noise);
    auto z_r = tape.add_noise(ops.encode(Domain::kSim, tape.constant(x_r)), st.rng_noise);
    auto c = ops.predict_control(z_s);
    Tensor label_t({static_cast<int>(labels.size()), 1});
    std::copy(labels.begin(), labels.end(), label_t.data.begin());
    auto ctrl_loss = loss_control(tape, c, tape.constant(label_t));

    auto grl = static_cast<float>(ada.grl);
    auto s_s = ops.ada_score(tape.grad_reverse(z_s, grl));
    auto s_r = ops.ada_score(tape.grad_reverse(z_r, grl));
    auto domain_loss = tape.wsum({{0.5f, tape.mse_const(s_s, 1.0f)},
                                  {0.5f, tape.mse_const(s_r, 0.0f)}});
    auto total = tape.wsum(
        {{1.0f, ctrl_loss}, {static_cast<float>(ada.lambda_domain), domain_loss}});

    st.model.translator.zero_grads();
    st.model.ctrl.zero_grads();
    st.model.discs.zero_grads();
    tape.backward(total);
    st.adam_translator.step(st.model.translator);
    st.adam_discs.step(st.model.discs);
    st.sgd_ctrl.step(st.model.ctrl);
    ++st.iteration;

    if (cfg.log_every > 0 &&
        (st.iteration % cfg.log_every == 0 || st.iteration == cfg.iterations)) {
      char line[96];
      std::snprintf(line, sizeof(line), "%lld,%.6f,%.6f\n",
                    static_cast<long long>(st.iteration),
                    static_cast<double>(tape.scalar(ctrl_loss)),
                    static_cast<double>(tape.scalar(domain_loss)));
      csv << line;
    }
    if (cfg.checkpoint_every > 0 && st.iteration % cfg.checkpoint_every == 0 &&
        st.iteration < cfg.iterations) {
      char name[64];
      std::snprintf(name, sizeof(name), "/ckpt_%06lld.ckpt",
                    static_cast<long long>(st.iteration));
      st.save(out_dir + name);
    }
  }
  csv.flush();

  TrainResult result;
  result.final_checkpoint = out_dir + "/final.ckpt";
  result.loss_csv = out_dir + "/loss.csv";
  st.save(result.final_checkpoint);
  return result;
}

}  // namespace simgap
