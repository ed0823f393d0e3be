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

#include "simgap/model.hpp"
#include "simgap/tape.hpp"

namespace simgap {

/// Weighted-sum coefficients in fixed order: recon, cyc, control, cyc_control,
/// lsgan_g, perceptual, z_recon. Ablations zero exactly one of them.
struct LossWeights {
  double recon = 10.0;
  double cyc = 10.0;
  double control = 1.0;
  double cyc_control = 1.0;
  double lsgan_g = 1.0;
  double perceptual = 1.0;
  double z_recon = 1.0;
};

template <typename T>
struct LossTerms {
  using Var = typename TapeT<T>::Var;
  Var recon, cyc, control, cyc_control, lsgan_g, perceptual, z_recon;
};

struct LossBreakdown {
  double recon = 0, cyc = 0, control = 0, cyc_control = 0, lsgan_g = 0, perceptual = 0,
         z_recon = 0;
  double total = 0;
};

template <typename T>
typename TapeT<T>::Var loss_recon(TapeT<T>& tape, typename TapeT<T>::Var x,
                                  typename TapeT<T>::Var x_recon);

template <typename T>
typename TapeT<T>::Var loss_cyclic(TapeT<T>& tape, typename TapeT<T>::Var x,
                                   typename TapeT<T>::Var x_cyc);

template <typename T>
typename TapeT<T>::Var loss_control(TapeT<T>& tape, typename TapeT<T>::Var pred,
                                    typename TapeT<T>::Var label);

template <typename T>
typename TapeT<T>::Var loss_cyc_control(TapeT<T>& tape, typename TapeT<T>::Var pred,
                                        typename TapeT<T>::Var pred_cyc);

/// Real scores toward 1, fake toward 0; each term averaged over the two
/// scales, the two terms summed (worst case 2).
template <typename T>
typename TapeT<T>::Var loss_lsgan_d(TapeT<T>& tape, typename TapeT<T>::Var real_full,
                                    typename TapeT<T>::Var real_half,
                                    typename TapeT<T>::Var fake_full,
                                    typename TapeT<T>::Var fake_half);

/// Fake scores toward 1, averaged over scales.
template <typename T>
typename TapeT<T>::Var loss_lsgan_g(TapeT<T>& tape, typename TapeT<T>::Var fake_full,
                                    typename TapeT<T>::Var fake_half);

/// L1 between instance-normalized features of the frozen extractor. The norm
/// makes global gain shifts cheap relative to structural edits.
template <typename T>
typename TapeT<T>::Var loss_perceptual(TapeT<T>& tape, ModelOps<T>& ops,
                                       typename TapeT<T>::Var x, typename TapeT<T>::Var y);

/// L1 plus a 1e-4 mean-square magnitude penalty on z, so identical latents
/// score the penalty alone and zero latents score exactly 0.
template <typename T>
typename TapeT<T>::Var loss_z_recon(TapeT<T>& tape, typename TapeT<T>::Var z,
                                    typename TapeT<T>::Var z_recon);

template <typename T>
typename TapeT<T>::Var total_loss(TapeT<T>& tape, const LossWeights& w,
                                  const LossTerms<T>& terms);

template <typename T>
LossBreakdown loss_breakdown(const TapeT<T>& tape, const LossWeights& w,
                             const LossTerms<T>& terms);

}  // namespace simgap
