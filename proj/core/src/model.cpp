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

#include "simgap/model.hpp"

#include <stdexcept>

namespace simgap {

const char* domain_name(Domain d) { return d == Domain::kSim ? "sim" : "real"; }

std::string domain_prefix(const char* stem, Domain d) {
  return std::string(stem) + "_" + domain_name(d);
}

namespace {

template <typename T>
void add_conv(ParamStoreT<T>& store, const std::string& name, int out_c, int in_c, int k,
              Rng& rng) {
  store.add(name + ".w", {out_c, in_c, k, k}, in_c * k * k, rng);
  store.add_zeros(name + ".b", {out_c});
}

template <typename T>
void add_tconv(ParamStoreT<T>& store, const std::string& name, int in_c, int out_c, int k,
               Rng& rng) {
  store.add(name + ".w", {in_c, out_c, k, k}, in_c * k * k, rng);
  store.add_zeros(name + ".b", {out_c});
}

template <typename T>
void add_fc(ParamStoreT<T>& store, const std::string& name, int out_n, int in_n, Rng& rng) {
  store.add(name + ".w", {out_n, in_n}, in_n, rng);
  store.add_zeros(name + ".b", {out_n});
}

template <typename T>
void init_encoder(ParamStoreT<T>& store, const std::string& p, const ModelConfig& cfg, Rng& rng) {
  int b = cfg.base_channels;
  add_conv(store, p + ".c0", b, 3, 7, rng);
  add_conv(store, p + ".c1", 2 * b, b, 4, rng);
  add_conv(store, p + ".c2", 4 * b, 2 * b, 4, rng);
  for (const char* r : {".r0", ".r1"}) {
    add_conv(store, p + r + ".a", 4 * b, 4 * b, 3, rng);
    add_conv(store, p + r + ".b", 4 * b, 4 * b, 3, rng);
  }
}

template <typename T>
void init_decoder(ParamStoreT<T>& store, const std::string& p, const ModelConfig& cfg, Rng& rng) {
  int b = cfg.base_channels;
  for (const char* r : {".r0", ".r1"}) {
    add_conv(store, p + r + ".a", 4 * b, 4 * b, 3, rng);
    add_conv(store, p + r + ".b", 4 * b, 4 * b, 3, rng);
  }
  add_tconv(store, p + ".t0", 4 * b, 2 * b, 4, rng);
  add_tconv(store, p + ".t1", 2 * b, b, 4, rng);
  add_conv(store, p + ".out", 3, b, 7, rng);
}

template <typename T>
void init_disc(ParamStoreT<T>& store, const std::string& p, const ModelConfig& cfg, Rng& rng) {
  int d = cfg.disc_channels;
  for (const char* s : {".s0", ".s1"}) {
    add_conv(store, p + s + ".c0", d, 3, 4, rng);
    add_conv(store, p + s + ".c1", 2 * d, d, 4, rng);
    add_conv(store, p + s + ".c2", 4 * d, 2 * d, 4, rng);
    add_conv(store, p + s + ".c3", 1, 4 * d, 3, rng);
  }
}

}  // namespace

template <typename T>
TransferModelT<T> TransferModelT<T>::create(const ModelConfig& cfg, uint64_t seed) {
  if (cfg.image_width % 4 || cfg.image_height % 4)
    throw std::invalid_argument("model: image extents must be divisible by 4");
  TransferModelT m;
  m.cfg = cfg;
  Rng rng(derive_seed(seed, "model:init"));

  init_encoder(m.translator, "enc_sim", cfg, rng);
  init_encoder(m.translator, "enc_real", cfg, rng);
  init_decoder(m.translator, "dec_sim", cfg, rng);
  init_decoder(m.translator, "dec_real", cfg, rng);
  init_disc(m.discs, "disc_sim", cfg, rng);
  init_disc(m.discs, "disc_real", cfg, rng);

  int cz = cfg.latent_channels();
  add_conv(m.ctrl, "ctrl.c0", cfg.ctrl_channels, cz + 2, 3, rng);
  add_conv(m.ctrl, "ctrl.c1", cfg.ctrl_channels, cfg.ctrl_channels + 2, 3, rng);
  add_fc(m.ctrl, "ctrl.f0", cfg.ctrl_fc, cfg.ctrl_channels, rng);
  add_fc(m.ctrl, "ctrl.f1", 1, cfg.ctrl_fc, rng);

  int pc = cfg.perc_channels;
  add_conv(m.perceptual, "perc.c0", pc, 3, 3, rng);
  add_conv(m.perceptual, "perc.c1", 2 * pc, pc, 3, rng);
  add_conv(m.perceptual, "perc.c2", 2 * pc, 2 * pc, 3, rng);
  add_conv(m.perceptual, "perc.c3", 2 * pc, 2 * pc, 3, rng);

  // Latent domain head for the feature-alignment baseline. Joint training
  // never binds these, but keeping them in every model gives all checkpoints
  // one layout.
  int ac = cfg.disc_channels;
  add_conv(m.discs, "ada.c0", ac, cz, 3, rng);
  add_conv(m.discs, "ada.c1", 2 * ac, ac, 3, rng);
  add_fc(m.discs, "ada.f0", 1, 2 * ac, rng);
  return m;
}

template <typename T>
int64_t TransferModelT<T>::param_count() const {
  return translator.total_count() + discs.total_count() + ctrl.total_count() +
         perceptual.total_count();
}

template <typename T>
ParamStoreT<T>* ModelOps<T>::store_of(const std::string& name) {
  if (name.rfind("enc_", 0) == 0 || name.rfind("dec_", 0) == 0) return &model_.translator;
  if (name.rfind("disc_", 0) == 0 || name.rfind("ada.", 0) == 0) return &model_.discs;
  if (name.rfind("ctrl.", 0) == 0) return &model_.ctrl;
  if (name.rfind("perc.", 0) == 0) return &model_.perceptual;
  throw std::logic_error("no store for param " + name);
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::conv_block(const std::string& name, Var x, int stride,
                                                  int pad, bool norm, bool act) {
  ParamStoreT<T>* store = store_of(name);
  bool frozen = name.rfind("perc.", 0) == 0;
  Var w = frozen ? tape_.constant(store->get(name + ".w").value)
                 : tape_.param(store->get(name + ".w"));
  Var b = frozen ? tape_.constant(store->get(name + ".b").value)
                 : tape_.param(store->get(name + ".b"));
  Var y = tape_.conv2d(x, w, b, stride, pad);
  if (norm) y = tape_.instance_norm(y);
  if (act) y = tape_.leaky_relu(y, static_cast<T>(model_.cfg.leaky_slope));
  return y;
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::tconv_block(const std::string& name, Var x, int stride,
                                                   int pad, bool norm, bool act) {
  ParamStoreT<T>* store = store_of(name);
  Var w = tape_.param(store->get(name + ".w"));
  Var b = tape_.param(store->get(name + ".b"));
  Var y = tape_.tconv2d(x, w, b, stride, pad);
  if (norm) y = tape_.instance_norm(y);
  if (act) y = tape_.leaky_relu(y, static_cast<T>(model_.cfg.leaky_slope));
  return y;
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::residual_block(const std::string& name, Var x) {
  Var h = conv_block(name + ".a", x, 1, 1, true, true);
  h = conv_block(name + ".b", h, 1, 1, true, false);
  return tape_.add(x, h);
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::encode(Domain d, Var image) {
  const auto& shape = tape_.val(image).shape;
  if (shape.size() != 4 || shape[1] != 3 || shape[2] != model_.cfg.image_height ||
      shape[3] != model_.cfg.image_width)
    throw std::invalid_argument("encode: image resolution mismatch");
  std::string p = domain_prefix("enc", d);
  Var h = conv_block(p + ".c0", image, 1, 3, true, true);
  h = conv_block(p + ".c1", h, 2, 1, true, true);
  h = conv_block(p + ".c2", h, 2, 1, true, true);
  h = residual_block(p + ".r0", h);
  h = residual_block(p + ".r1", h);
  return h;
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::encode_train(Domain d, Var image, Rng& rng) {
  return tape_.add_noise(encode(d, image), rng);
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::decode(Domain d, Var z) {
  const auto& shape = tape_.val(z).shape;
  if (shape.size() != 4 || shape[1] != model_.cfg.latent_channels() ||
      shape[2] != model_.cfg.latent_height() || shape[3] != model_.cfg.latent_width())
    throw std::invalid_argument("decode: latent shape mismatch");
  std::string p = domain_prefix("dec", d);
  Var h = residual_block(p + ".r0", z);
  h = residual_block(p + ".r1", h);
  h = tconv_block(p + ".t0", h, 2, 1, true, true);
  h = tconv_block(p + ".t1", h, 2, 1, true, true);
  h = conv_block(p + ".out", h, 1, 3, false, false);
  return tape_.tanh_(h);
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::translate(Domain from, Domain to, Var image) {
  if (from == to) throw std::invalid_argument("translate: same-domain request");
  return decode(to, encode(from, image));
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::predict_control(Var z) {
  const auto& shape = tape_.val(z).shape;
  if (shape.size() != 4 || shape[1] != model_.cfg.latent_channels())
    throw std::invalid_argument("predict_control: latent shape mismatch");
  Var h = tape_.coord_channels(z);
  h = conv_block("ctrl.c0", h, 1, 1, false, true);
  h = tape_.coord_channels(h);
  h = conv_block("ctrl.c1", h, 1, 1, false, true);
  h = tape_.global_avg_pool(h);
  Var w0 = tape_.param(model_.ctrl.get("ctrl.f0.w"));
  Var b0 = tape_.param(model_.ctrl.get("ctrl.f0.b"));
  h = tape_.leaky_relu(tape_.fc(h, w0, b0), static_cast<T>(model_.cfg.leaky_slope));
  Var w1 = tape_.param(model_.ctrl.get("ctrl.f1.w"));
  Var b1 = tape_.param(model_.ctrl.get("ctrl.f1.b"));
  return tape_.tanh_(tape_.fc(h, w1, b1));
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::disc_stack(const std::string& prefix, Var x) {
  Var h = conv_block(prefix + ".c0", x, 2, 1, false, true);
  h = conv_block(prefix + ".c1", h, 2, 1, false, true);
  h = conv_block(prefix + ".c2", h, 2, 1, false, true);
  return conv_block(prefix + ".c3", h, 1, 1, false, false);
}

template <typename T>
std::pair<typename ModelOps<T>::Var, typename ModelOps<T>::Var> ModelOps<T>::discriminate(
    Domain d, Var image) {
  const auto& shape = tape_.val(image).shape;
  if (shape.size() != 4 || shape[1] != 3 || shape[2] != model_.cfg.image_height ||
      shape[3] != model_.cfg.image_width)
    throw std::invalid_argument("discriminate: image shape mismatch");
  std::string p = domain_prefix("disc", d);
  Var full = disc_stack(p + ".s0", image);
  Var half = disc_stack(p + ".s1", tape_.avg_pool2(image));
  return {full, half};
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::ada_score(Var z) {
  Var h = conv_block("ada.c0", z, 2, 1, false, true);
  h = conv_block("ada.c1", h, 2, 1, false, true);
  h = tape_.global_avg_pool(h);
  Var w = tape_.param(model_.discs.get("ada.f0.w"));
  Var b = tape_.param(model_.discs.get("ada.f0.b"));
  return tape_.fc(h, w, b);
}

template <typename T>
typename ModelOps<T>::Var ModelOps<T>::perceptual_features(Var image) {
  Var h = conv_block("perc.c0", image, 1, 1, false, true);
  h = conv_block("perc.c1", h, 2, 1, false, true);
  h = conv_block("perc.c2", h, 2, 1, false, true);
  return conv_block("perc.c3", h, 1, 1, false, false);
}

template struct TransferModelT<float>;
template struct TransferModelT<double>;
template class ModelOps<float>;
template class ModelOps<double>;

}  // namespace simgap
