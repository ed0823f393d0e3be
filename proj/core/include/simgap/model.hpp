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
#include <utility>

#include "simgap/optim.hpp"
#include "simgap/tape.hpp"

namespace simgap {

/// Width knobs. The reference stack is base 32 (encoder 32/64/128, latent 128
/// channels at H/4 x W/4); desk configs shrink base_channels to fit a CPU
/// budget while keeping every structural element.
struct ModelConfig {
  int image_width = 64;
  int image_height = 48;
  int base_channels = 32;  // encoder widths b, 2b, 4b; latent C_z = 4b
  int disc_channels = 32;
  int ctrl_channels = 64;
  int ctrl_fc = 64;
  int perc_channels = 8;
  double leaky_slope = 0.2;

  int latent_channels() const { return 4 * base_channels; }
  int latent_height() const { return image_height / 4; }
  int latent_width() const { return image_width / 4; }
};

/// Both domain encoders/decoders share one latent shape; the controller reads
/// that latent; per-domain discriminators score images at full and half
/// resolution; a frozen random conv stack provides perceptual features.
///
/// Parameter partition mirrors the two-optimizer training scheme: translator
/// (both E and both G) and discriminators get Adam, the controller gets SGD,
/// and the perceptual stack is never stepped.
template <typename T>
struct TransferModelT {
  ModelConfig cfg;
  ParamStoreT<T> translator;  // enc_sim.*, enc_real.*, dec_sim.*, dec_real.*
  ParamStoreT<T> discs;       // disc_sim.*, disc_real.* (s0/s1 scales), ada.*
  ParamStoreT<T> ctrl;
  ParamStoreT<T> perceptual;  // frozen

  static TransferModelT create(const ModelConfig& cfg, uint64_t seed);
  int64_t param_count() const;
};

enum class Domain { kSim, kReal };
const char* domain_name(Domain d);
std::string domain_prefix(const char* stem, Domain d);  // "enc" -> "enc_sim"

/// Forward builders. All take the tape plus the model; parameters are bound
/// as tape leaves on each call. The perceptual stack binds as constants so
/// no gradient ever reaches it.
template <typename T>
class ModelOps {
 public:
  using Var = typename TapeT<T>::Var;

  ModelOps(TapeT<T>& tape, TransferModelT<T>& model) : tape_(tape), model_(model) {}

  /// Pre-noise latent; training adds unit noise via encode_train.
  Var encode(Domain d, Var image);
  Var encode_train(Domain d, Var image, Rng& rng);  // encode + N(0,1)
  Var decode(Domain d, Var z);                      // tanh image
  Var translate(Domain from, Domain to, Var image);  // inference path, no noise
  Var predict_control(Var z);                        // (N,1), tanh
  std::pair<Var, Var> discriminate(Domain d, Var image);  // full, half score maps
  Var perceptual_features(Var image);
  Var ada_score(Var z);  // (N,1) latent domain score, used by one baseline only

 private:
  Var conv_block(const std::string& name, Var x, int stride, int pad, bool norm, bool act);
  Var tconv_block(const std::string& name, Var x, int stride, int pad, bool norm, bool act);
  Var residual_block(const std::string& name, Var x);
  Var disc_stack(const std::string& prefix, Var x);

  ParamStoreT<T>* store_of(const std::string& name);

  TapeT<T>& tape_;
  TransferModelT<T>& model_;
};

using TransferModel = TransferModelT<float>;

}  // namespace simgap
