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

#include "simgap/losses.hpp"

namespace simgap {

template <typename T>
typename TapeT<T>::Var loss_recon(TapeT<T>& tape, typename TapeT<T>::Var x,
                                  typename TapeT<T>::Var x_recon) {
  return tape.l1_mean(x, x_recon);
}

template <typename T>
typename TapeT<T>::Var loss_cyclic(TapeT<T>& tape, typename TapeT<T>::Var x,
                                   typename TapeT<T>::Var x_cyc) {
  return tape.l1_mean(x, x_cyc);
}

template <typename T>
typename TapeT<T>::Var loss_control(TapeT<T>& tape, typename TapeT<T>::Var pred,
                                    typename TapeT<T>::Var label) {
  return tape.l1_mean(pred, label);
}

template <typename T>
typename TapeT<T>::Var loss_cyc_control(TapeT<T>& tape, typename TapeT<T>::Var pred,
                                        typename TapeT<T>::Var pred_cyc) {
  return tape.l1_mean(pred, pred_cyc);
}

template <typename T>
typename TapeT<T>::Var loss_lsgan_d(TapeT<T>& tape, typename TapeT<T>::Var real_full,
                                    typename TapeT<T>::Var real_half,
                                    typename TapeT<T>::Var fake_full,
                                    typename TapeT<T>::Var fake_half) {
  auto half = static_cast<T>(0.5);
  return tape.wsum({{half, tape.mse_const(real_full, static_cast<T>(1))},
                    {half, tape.mse_const(real_half, static_cast<T>(1))},
                    {half, tape.mse_const(fake_full, static_cast<T>(0))},
                    {half, tape.mse_const(fake_half, static_cast<T>(0))}});
}

template <typename T>
typename TapeT<T>::Var loss_lsgan_g(TapeT<T>& tape, typename TapeT<T>::Var fake_full,
                                    typename TapeT<T>::Var fake_half) {
  auto half = static_cast<T>(0.5);
  return tape.wsum({{half, tape.mse_const(fake_full, static_cast<T>(1))},
                    {half, tape.mse_const(fake_half, static_cast<T>(1))}});
}

template <typename T>
typename TapeT<T>::Var loss_perceptual(TapeT<T>& tape, ModelOps<T>& ops,
                                       typename TapeT<T>::Var x, typename TapeT<T>::Var y) {
  auto fx = tape.instance_norm(ops.perceptual_features(x));
  auto fy = tape.instance_norm(ops.perceptual_features(y));
  return tape.l1_mean(fx, fy);
}

template <typename T>
typename TapeT<T>::Var loss_z_recon(TapeT<T>& tape, typename TapeT<T>::Var z,
                                    typename TapeT<T>::Var z_recon) {
  return tape.wsum({{static_cast<T>(1), tape.l1_mean(z, z_recon)},
                    {static_cast<T>(1e-4), tape.mse_const(z, static_cast<T>(0))}});
}

template <typename T>
typename TapeT<T>::Var total_loss(TapeT<T>& tape, const LossWeights& w,
                                  const LossTerms<T>& terms) {
  return tape.wsum({{static_cast<T>(w.recon), terms.recon},
                    {static_cast<T>(w.cyc), terms.cyc},
                    {static_cast<T>(w.control), terms.control},
                    {static_cast<T>(w.cyc_control), terms.cyc_control},
                    {static_cast<T>(w.lsgan_g), terms.lsgan_g},
                    {static_cast<T>(w.perceptual), terms.perceptual},
                    {static_cast<T>(w.z_recon), terms.z_recon}});
}

template <typename T>
LossBreakdown loss_breakdown(const TapeT<T>& tape, const LossWeights& w,
                             const LossTerms<T>& terms) {
  LossBreakdown b;
  b.recon = tape.scalar(terms.recon);
  b.cyc = tape.scalar(terms.cyc);
  b.control = tape.scalar(terms.control);
  b.cyc_control = tape.scalar(terms.cyc_control);
  b.lsgan_g = tape.scalar(terms.lsgan_g);
  b.perceptual = tape.scalar(terms.perceptual);
  b.z_recon = tape.scalar(terms.z_recon);
  b.total = w.recon * b.recon + w.cyc * b.cyc + w.control * b.control +
            w.cyc_control * b.cyc_control + w.lsgan_g * b.lsgan_g + w.perceptual * b.perceptual +
            w.z_recon * b.z_recon;
  return b;
}

#define SIMGAP_LOSSES_INST(T)                                                                  \
  template TapeT<T>::Var loss_recon<T>(TapeT<T>&, TapeT<T>::Var, TapeT<T>::Var);               \
  template TapeT<T>::Var loss_cyclic<T>(TapeT<T>&, TapeT<T>::Var, TapeT<T>::Var);              \
  template TapeT<T>::Var loss_control<T>(TapeT<T>&, TapeT<T>::Var, TapeT<T>::Var);             \
  template TapeT<T>::Var loss_cyc_control<T>(TapeT<T>&, TapeT<T>::Var, TapeT<T>::Var);         \
  template TapeT<T>::Var loss_lsgan_d<T>(TapeT<T>&, TapeT<T>::Var, TapeT<T>::Var,              \
                                         TapeT<T>::Var, TapeT<T>::Var);                        \
  template TapeT<T>::Var loss_lsgan_g<T>(TapeT<T>&, TapeT<T>::Var, TapeT<T>::Var);             \
  template TapeT<T>::Var loss_perceptual<T>(TapeT<T>&, ModelOps<T>&, TapeT<T>::Var,            \
                                            TapeT<T>::Var);                                    \
  template TapeT<T>::Var loss_z_recon<T>(TapeT<T>&, TapeT<T>::Var, TapeT<T>::Var);             \
  template TapeT<T>::Var total_loss<T>(TapeT<T>&, const LossWeights&, const LossTerms<T>&);    \
  template LossBreakdown loss_breakdown<T>(const TapeT<T>&, const LossWeights&,                \
                                           const LossTerms<T>&);

SIMGAP_LOSSES_INST(float)
SIMGAP_LOSSES_INST(double)
#undef SIMGAP_LOSSES_INST

}  // namespace simgap
