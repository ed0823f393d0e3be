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

#include "simgap/trainer.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "simgap/evaluator.hpp"

namespace simgap {

const char* ablation_name(AblationMode m) {
  switch (m) {
    case AblationMode::kNone: return "none";
    case AblationMode::kDropRecon: return "drop_recon";
    case AblationMode::kDropCyc: return "drop_cyc";
    case AblationMode::kDropCycControl: return "drop_cyc_control";
    case AblationMode::kDropGan: return "drop_gan";
    case AblationMode::kDropPerceptual: return "drop_perceptual";
    case AblationMode::kDropZRecon: return "drop_z_recon";
    case AblationMode::kStethoscope: return "stethoscope";
  }
  return "?";
}

AblationMode ablation_from_name(const std::string& name) {
  for (AblationMode m :
       {AblationMode::kNone, AblationMode::kDropRecon, AblationMode::kDropCyc,
        AblationMode::kDropCycControl, AblationMode::kDropGan, AblationMode::kDropPerceptual,
        AblationMode::kDropZRecon, AblationMode::kStethoscope})
    if (name == ablation_name(m)) return m;
  throw std::invalid_argument("unknown ablation mode: " + name);
}

LossWeights apply_ablation(LossWeights w, AblationMode m) {
  switch (m) {
    case AblationMode::kNone: break;
    case AblationMode::kDropRecon: w.recon = 0; break;
    case AblationMode::kDropCyc: w.cyc = 0; break;
    case AblationMode::kDropCycControl: w.cyc_control = 0; break;
    case AblationMode::kDropGan: w.lsgan_g = 0; break;
    case AblationMode::kDropPerceptual: w.perceptual = 0; break;
    case AblationMode::kDropZRecon: w.z_recon = 0; break;
    case AblationMode::kStethoscope: break;  // weights untouched, gradients severed
  }
  return w;
}

TrainState::TrainState(const TrainConfig& c)
    : cfg(c),
      model(TransferModel::create(c.model, c.seed)),
      adam_translator(static_cast<float>(c.adam_lr), static_cast<float>(c.adam_beta1),
                      static_cast<float>(c.adam_beta2)),
      adam_discs(static_cast<float>(c.adam_lr), static_cast<float>(c.adam_beta1),
                 static_cast<float>(c.adam_beta2)),
      sgd_ctrl(static_cast<float>(c.sgd_lr)),
      rng_sim(derive_seed(c.seed, "train:sampler:sim")),
      rng_target(derive_seed(c.seed, "train:sampler:target")),
      rng_noise(derive_seed(c.seed, "train:noise")) {}

CheckpointRefs TrainState::refs() {
  CheckpointRefs r;
  r.stores = {{"translator", &model.translator},
              {"discs", &model.discs},
              {"ctrl", &model.ctrl},
              {"perceptual", &model.perceptual}};
  r.optims = {{"adam_translator", &adam_translator}, {"adam_discs", &adam_discs}};
  r.rngs = {{"sampler:sim", &rng_sim}, {"sampler:target", &rng_target}, {"noise", &rng_noise}};
  return r;
}

void TrainState::save(const std::string& path) {
  nlohmann::json meta;
  meta["iteration"] = iteration;
  meta["seed"] = cfg.seed;
  meta["ablation"] = ablation_name(cfg.ablation);
  meta["model"] = model_config_to_json(cfg.model);
  save_checkpoint(path, meta, refs());
}

void TrainState::load(const std::string& path) {
  nlohmann::json meta = load_checkpoint(path, refs());
  iteration = meta.at("iteration").get<int64_t>();
}

nlohmann::json model_config_to_json(const ModelConfig& cfg) {
  return {{"imageWidth", cfg.image_width},     {"imageHeight", cfg.image_height},
          {"baseChannels", cfg.base_channels}, {"discChannels", cfg.disc_channels},
          {"ctrlChannels", cfg.ctrl_channels}, {"ctrlFc", cfg.ctrl_fc},
          {"percChannels", cfg.perc_channels}, {"leakySlope", cfg.leaky_slope}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.image_width = j.at("imageWidth").get<int>();
  cfg.image_height = j.at("imageHeight").get<int>();
  cfg.base_channels = j.at("baseChannels").get<int>();
  cfg.disc_channels = j.at("discChannels").get<int>();
  cfg.ctrl_channels = j.at("ctrlChannels").get<int>();
  cfg.ctrl_fc = j.at("ctrlFc").get<int>();
  cfg.perc_channels = j.at("percChannels").get<int>();
  cfg.leaky_slope = j.at("leakySlope").get<double>();
  return cfg;
}

ModelConfig model_config_of_checkpoint(const std::string& path) {
  nlohmann::json info = read_checkpoint_meta(path);
  return model_config_from_json(info.at("meta").at("model"));
}

TransferModel load_model_from_checkpoint(const std::string& path, const ModelConfig& cfg) {
  TrainConfig tc;
  tc.model = cfg;
  TrainState st(tc);
  st.load(path);
  return std::move(st.model);
}

Tensor make_image_batch(const PixelCache& cache, const std::vector<int>& frame_indices,
                        const std::vector<int>& picks) {
  int n = static_cast<int>(picks.size());
  Tensor batch({n, 3, cache.height, cache.width});
  const float k = 2.0f / 255.0f;
  size_t plane = static_cast<size_t>(cache.height) * cache.width;
  for (int i = 0; i < n; ++i) {
    const auto& px = cache.frames.at(
        static_cast<size_t>(frame_indices.at(static_cast<size_t>(picks[static_cast<size_t>(i)]))));
    float* dst = batch.data.data() + static_cast<size_t>(i) * 3 * plane;
    for (size_t p = 0; p < plane; ++p) {
      dst[p] = k * px[3 * p] - 1.0f;
      dst[plane + p] = k * px[3 * p + 1] - 1.0f;
      dst[2 * plane + p] = k * px[3 * p + 2] - 1.0f;
    }
  }
  return batch;
}

std::vector<float> gather_labels(const Dataset& ds, const std::vector<int>& frame_indices,
                                 const std::vector<int>& picks) {
  std::vector<float> labels;
  labels.reserve(picks.size());
  for (int p : picks)
    labels.push_back(static_cast<float>(
        ds.frames.at(static_cast<size_t>(frame_indices.at(static_cast<size_t>(p)))).steering));
  return labels;
}

StepMetrics train_step(TrainState& st, const Tensor& sim_batch,
                       const std::vector<float>& sim_labels, const Tensor& target_batch) {
  const LossWeights w = apply_ablation(st.cfg.weights, st.cfg.ablation);
  const bool steth = st.cfg.ablation == AblationMode::kStethoscope;
  using Var = TapeT<float>::Var;

  TapeT<float> tg;
  ModelOps<float> ops(tg, st.model);
  Var x_s = tg.constant(sim_batch);
  Var x_r = tg.constant(target_batch);

  // Noise draws happen in a fixed order so every mode consumes the stream
  // identically: z_s, z_r, z_sr, z_rs.
  Var z_s_pre = ops.encode(Domain::kSim, x_s);
  Var z_s = tg.add_noise(z_s_pre, st.rng_noise);
  Var z_r_pre = ops.encode(Domain::kReal, x_r);
  Var z_r = tg.add_noise(z_r_pre, st.rng_noise);

  Var x_s_rec = ops.decode(Domain::kSim, z_s);
  Var x_r_rec = ops.decode(Domain::kReal, z_r);
  Var x_sr = ops.decode(Domain::kReal, z_s);  // sim content in the target look
  Var x_rs = ops.decode(Domain::kSim, z_r);

  Var z_sr_pre = ops.encode(Domain::kReal, x_sr);
  Var z_sr = tg.add_noise(z_sr_pre, st.rng_noise);
  Var z_rs_pre = ops.encode(Domain::kSim, x_rs);
  Var z_rs = tg.add_noise(z_rs_pre, st.rng_noise);

  Var x_s_cyc = ops.decode(Domain::kSim, z_sr);
  Var x_r_cyc = ops.decode(Domain::kReal, z_rs);

  auto ctrl_in = [&](Var z) { return steth ? tg.detach(z) : z; };
  Var c_s = ops.predict_control(ctrl_in(z_s));
  Var c_r = ops.predict_control(ctrl_in(z_r));
  Var c_sr = ops.predict_control(ctrl_in(z_sr));
  Var c_rs = ops.predict_control(ctrl_in(z_rs));

  if (static_cast<int>(sim_labels.size()) != sim_batch.dim(0))
    throw std::invalid_argument("train_step: label count mismatch");
  Tensor label_t({sim_batch.dim(0), 1});
  std::copy(sim_labels.begin(), sim_labels.end(), label_t.data.begin());
  Var labels = tg.constant(label_t);

  const float h = 0.5f;
  LossTerms<float> terms;
  terms.recon =
      tg.wsum({{h, loss_recon(tg, x_s, x_s_rec)}, {h, loss_recon(tg, x_r, x_r_rec)}});
  terms.cyc = tg.wsum({{h, loss_cyclic(tg, x_s, x_s_cyc)}, {h, loss_cyclic(tg, x_r, x_r_cyc)}});
  terms.control = loss_control(tg, c_s, labels);
  terms.cyc_control = tg.wsum(
      {{h, loss_cyc_control(tg, c_s, c_sr)}, {h, loss_cyc_control(tg, c_r, c_rs)}});
  terms.perceptual = tg.wsum(
      {{h, loss_perceptual(tg, ops, x_s, x_sr)}, {h, loss_perceptual(tg, ops, x_r, x_rs)}});
  terms.z_recon = tg.wsum(
      {{h, loss_z_recon(tg, z_s_pre, z_sr_pre)}, {h, loss_z_recon(tg, z_r_pre, z_rs_pre)}});

  // Discriminator phase on its own tape, fakes frozen to constants. The
  // drop_gan mode still runs it: the discriminators keep learning, only the
  // generator stops listening.
  StepMetrics metrics;
  {
    TapeT<float> td;
    ModelOps<float> dops(td, st.model);
    Var dx_s = td.constant(sim_batch);
    Var dx_r = td.constant(target_batch);
    Var fake_rs = td.constant(tg.val(x_rs));
    Var fake_sr = td.constant(tg.val(x_sr));
    auto [real_sf, real_sh] = dops.discriminate(Domain::kSim, dx_s);
    auto [fake_sf, fake_sh] = dops.discriminate(Domain::kSim, fake_rs);
    Var d_sim = loss_lsgan_d(td, real_sf, real_sh, fake_sf, fake_sh);
    auto [real_rf, real_rh] = dops.discriminate(Domain::kReal, dx_r);
    auto [fake_rf, fake_rh] = dops.discriminate(Domain::kReal, fake_sr);
    Var d_real = loss_lsgan_d(td, real_rf, real_rh, fake_rf, fake_rh);
    Var d_total = td.wsum({{1.0f, d_sim}, {1.0f, d_real}});
    metrics.d_sim = td.scalar(d_sim);
    metrics.d_real = td.scalar(d_real);
    metrics.d_total = td.scalar(d_total);
    st.model.discs.zero_grads();
    td.backward(d_total);
    st.adam_discs.step(st.model.discs);
  }

  // Generator adversarial terms against the just-updated discriminators.
  auto [g_srf, g_srh] = ops.discriminate(Domain::kReal, x_sr);
  auto [g_rsf, g_rsh] = ops.discriminate(Domain::kSim, x_rs);
  terms.lsgan_g =
      tg.wsum({{h, loss_lsgan_g(tg, g_srf, g_srh)}, {h, loss_lsgan_g(tg, g_rsf, g_rsh)}});

  Var total = total_loss(tg, w, terms);
  st.model.translator.zero_grads();
  st.model.ctrl.zero_grads();
  tg.backward(total);
  st.adam_translator.step(st.model.translator);
  st.sgd_ctrl.step(st.model.ctrl);

  metrics.g = loss_breakdown(tg, w, terms);
  return metrics;
}

namespace {

std::vector<int> draw_picks(Rng& rng, size_t space, int count) {
  std::vector<int> picks(static_cast<size_t>(count));
  for (auto& p : picks) p = static_cast<int>(rng.uniform_int(space));
  return picks;
}

void write_csv_header(std::ofstream& csv) {
  csv << "iteration,recon,cyc,control,cyc_control,lsgan_g,perceptual,z_recon,total,"
         "d_total,d_sim,d_real\n";
}

void write_csv_row(std::ofstream& csv, int64_t it, const StepMetrics& m) {
  char line[320];
  std::snprintf(line, sizeof(line),
                "%lld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                static_cast<long long>(it), m.g.recon, m.g.cyc, m.g.control, m.g.cyc_control,
                m.g.lsgan_g, m.g.perceptual, m.g.z_recon, m.g.total, m.d_total, m.d_sim,
                m.d_real);
  csv << line;
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const TrainData& data, const std::string& out_dir,
                  const std::string& resume_from) {
  if (!data.sim || !data.sim_cache || !data.target || !data.target_cache)
    throw std::invalid_argument("train: datasets not wired");
  if (data.sim_plan.empty() || data.target_frames.empty())
    throw std::invalid_argument("train: empty sampling plan");
  std::filesystem::create_directories(out_dir);

  TrainState st(cfg);
  std::string csv_path = out_dir + "/loss.csv";
  std::ofstream csv;
  if (resume_from.empty()) {
    csv.open(csv_path, std::ios::trunc);
    write_csv_header(csv);
  } else {
    st.load(resume_from);
    csv.open(csv_path, std::ios::app);
  }
  if (!csv) throw std::runtime_error("train: cannot open " + csv_path);

  while (st.iteration < cfg.iterations) {
    std::vector<int> sim_pos = draw_picks(st.rng_sim, data.sim_plan.size(), cfg.batch_size);
    std::vector<int> sim_picks;
    sim_picks.reserve(sim_pos.size());
    for (int p : sim_pos) sim_picks.push_back(data.sim_plan[static_cast<size_t>(p)]);
    std::vector<int> tgt_picks = draw_picks(st.rng_target, data.target_frames.size(),
                                            cfg.batch_size);

    Tensor x_s = make_image_batch(*data.sim_cache, data.sim_frames, sim_picks);
    std::vector<float> labels = gather_labels(*data.sim, data.sim_frames, sim_picks);
    Tensor x_r = make_image_batch(*data.target_cache, data.target_frames, tgt_picks);

    StepMetrics m = train_step(st, x_s, labels, x_r);
    ++st.iteration;

    if (cfg.log_every > 0 &&
        (st.iteration % cfg.log_every == 0 || st.iteration == cfg.iterations))
      write_csv_row(csv, st.iteration, m);
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
  result.loss_csv = csv_path;
  st.save(result.final_checkpoint);
  return result;
}

namespace {

OpenLoopResult eval_target_open(const std::string& ckpt, const ModelConfig& mc,
                                const Dataset& target_ds,
                                const std::vector<int>& target_test_frames,
                                const PixelCache& target_cache) {
  auto model = std::make_shared<TransferModel>(load_model_from_checkpoint(ckpt, mc));
  auto policy = make_model_policy(model, Domain::kReal, "full");
  std::vector<double> preds =
      predict_dataset(*policy, target_ds, target_test_frames, target_cache);
  std::vector<double> labels;
  labels.reserve(target_test_frames.size());
  for (int idx : target_test_frames)
    labels.push_back(target_ds.frames.at(static_cast<size_t>(idx)).steering);
  return open_loop_eval(preds, labels);
}

}  // namespace

AblationSuiteResult run_ablation_suite(const TrainConfig& base_cfg, const TrainData& data,
                                       const Dataset& target_ds,
                                       const std::vector<int>& target_test_frames,
                                       const PixelCache& target_cache,
                                       const std::vector<uint64_t>& seeds,
                                       const std::vector<AblationMode>& modes,
                                       const std::string& out_dir,
                                       const std::vector<std::string>& baseline_ckpts,
                                       bool reuse_existing) {
  if (seeds.empty()) throw std::invalid_argument("ablation suite: no seeds");
  if (!baseline_ckpts.empty() && baseline_ckpts.size() != seeds.size())
    throw std::invalid_argument("ablation suite: baseline checkpoint count != seed count");

  auto run_one = [&](AblationMode mode, uint64_t seed) -> std::string {
    TrainConfig cfg = base_cfg;
    cfg.ablation = mode;
    cfg.seed = seed;
    char sub[96];
    std::snprintf(sub, sizeof(sub), "/%s/seed%llu", ablation_name(mode),
                  static_cast<unsigned long long>(seed));
    std::string dir = out_dir + sub;
    std::string final_ckpt = dir + "/final.ckpt";
    if (reuse_existing && std::filesystem::exists(final_ckpt)) return final_ckpt;
    return train(cfg, data, dir).final_checkpoint;
  };

  AblationSuiteResult result;
  double base_mae_sum = 0, base_bmae_sum = 0;
  for (size_t i = 0; i < seeds.size(); ++i) {
    std::string ckpt =
        baseline_ckpts.empty() ? run_one(AblationMode::kNone, seeds[i]) : baseline_ckpts[i];
    OpenLoopResult r =
        eval_target_open(ckpt, base_cfg.model, target_ds, target_test_frames, target_cache);
    base_mae_sum += r.mae;
    base_bmae_sum += r.balanced_mae;
  }
  result.base_mae = base_mae_sum / static_cast<double>(seeds.size());
  result.base_bmae = base_bmae_sum / static_cast<double>(seeds.size());

  for (AblationMode mode : modes) {
    AblationRow row;
    row.mode = mode;
    double mae_sum = 0, bmae_sum = 0;
    for (uint64_t seed : seeds) {
      std::string ckpt = run_one(mode, seed);
      OpenLoopResult r =
          eval_target_open(ckpt, base_cfg.model, target_ds, target_test_frames, target_cache);
      mae_sum += r.mae;
      bmae_sum += r.balanced_mae;
      row.per_seed_bmae.push_back(r.balanced_mae);
    }
    row.mean_mae = mae_sum / static_cast<double>(seeds.size());
    row.mean_bmae = bmae_sum / static_cast<double>(seeds.size());
    row.mae_multiplier = row.mean_mae / result.base_mae;
    row.bmae_multiplier = row.mean_bmae / result.base_bmae;
    result.rows.push_back(row);
  }
  return result;
}

nlohmann::json ablation_suite_to_json(const AblationSuiteResult& r) {
  nlohmann::json j;
  j["format"] = "ablation/1";
  j["baseMae"] = r.base_mae;
  j["baseBalancedMae"] = r.base_bmae;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"mode", ablation_name(row.mode)},
                    {"meanMae", row.mean_mae},
                    {"meanBalancedMae", row.mean_bmae},
                    {"maeMultiplier", row.mae_multiplier},
                    {"balancedMaeMultiplier", row.bmae_multiplier},
                    {"perSeedBalancedMae", row.per_seed_bmae}});
  j["rows"] = rows;
  return j;
}

}  // namespace simgap
