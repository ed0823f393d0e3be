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

#include "simgap/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "simgap/blas.hpp"

namespace simgap {

namespace {

// Patch extraction for GEMM-backed conv. cols is (C*KH*KW) x (OH*OW).
template <typename T>
void im2col(const T* src, int C, int H, int W, int KH, int KW, int stride, int pad, T* cols,
            int OH, int OW) {
  const size_t area = static_cast<size_t>(OH) * OW;
  for (int c = 0; c < C; ++c)
    for (int kh = 0; kh < KH; ++kh)
      for (int kw = 0; kw < KW; ++kw) {
        T* dst = cols + (static_cast<size_t>(c) * KH * KW + kh * KW + kw) * area;
        for (int oh = 0; oh < OH; ++oh) {
          int ih = oh * stride - pad + kh;
          T* drow = dst + static_cast<size_t>(oh) * OW;
          if (ih < 0 || ih >= H) {
            std::fill(drow, drow + OW, T(0));
            continue;
          }
          const T* srow = src + (static_cast<size_t>(c) * H + ih) * W;
          for (int ow = 0; ow < OW; ++ow) {
            int iw = ow * stride - pad + kw;
            drow[ow] = (iw >= 0 && iw < W) ? srow[iw] : T(0);
          }
        }
      }
}

template <typename T>
void col2im_add(const T* cols, int C, int H, int W, int KH, int KW, int stride, int pad, T* dst,
                int OH, int OW) {
  const size_t area = static_cast<size_t>(OH) * OW;
  for (int c = 0; c < C; ++c)
    for (int kh = 0; kh < KH; ++kh)
      for (int kw = 0; kw < KW; ++kw) {
        const T* src = cols + (static_cast<size_t>(c) * KH * KW + kh * KW + kw) * area;
        for (int oh = 0; oh < OH; ++oh) {
          int ih = oh * stride - pad + kh;
          if (ih < 0 || ih >= H) continue;
          T* drow = dst + (static_cast<size_t>(c) * H + ih) * W;
          const T* srow = src + static_cast<size_t>(oh) * OW;
          for (int ow = 0; ow < OW; ++ow) {
            int iw = ow * stride - pad + kw;
            if (iw >= 0 && iw < W) drow[iw] += srow[ow];
          }
        }
      }
}

int out_extent(int in, int k, int stride, int pad) { return (in + 2 * pad - k) / stride + 1; }

}  // namespace

// ---------------------------------------------------------------------------
// ParamStoreT

template <typename T>
ParamT<T>& ParamStoreT<T>::add(const std::string& name, std::vector<int> shape, int fan_in,
                               Rng& rng) {
  if (index_.count(name)) throw std::invalid_argument("param exists: " + name);
  auto p = std::make_unique<ParamT<T>>();
  p->name = name;
  const double bound = std::sqrt(3.0 / fan_in);
  p->value = uniform_tensor<T>(shape, rng, -bound, bound);
  p->grad = TensorT<T>::zeros(shape);
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

template <typename T>
ParamT<T>& ParamStoreT<T>::add_zeros(const std::string& name, std::vector<int> shape) {
  if (index_.count(name)) throw std::invalid_argument("param exists: " + name);
  auto p = std::make_unique<ParamT<T>>();
  p->name = name;
  p->value = TensorT<T>::zeros(shape);
  p->grad = TensorT<T>::zeros(shape);
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

template <typename T>
ParamT<T>& ParamStoreT<T>::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no such param: " + name);
  return *params_[it->second];
}

template <typename T>
const ParamT<T>& ParamStoreT<T>::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no such param: " + name);
  return *params_[it->second];
}

template <typename T>
void ParamStoreT<T>::zero_grads() {
  for (auto& p : params_) std::fill(p->grad.data.begin(), p->grad.data.end(), T(0));
}

template <typename T>
int64_t ParamStoreT<T>::total_count() const {
  int64_t n = 0;
  for (auto& p : params_) n += p->value.numel();
  return n;
}

// ---------------------------------------------------------------------------
// TapeT

template <typename T>
typename TapeT<T>::Var TapeT<T>::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Var>(nodes_.size() - 1);
}

template <typename T>
TensorT<T>& TapeT<T>::grad_ref(Var v) {
  Node& n = nodes_[static_cast<size_t>(v)];
  if (!n.has_grad) {
    n.grad = TensorT<T>::zeros(n.value.shape);
    n.has_grad = true;
  }
  return n.grad;
}

template <typename T>
T TapeT<T>::scalar(Var v) const {
  const TensorT<T>& t = val(v);
  if (t.numel() != 1) throw std::logic_error("scalar() on non-scalar node");
  return t.data[0];
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::constant(TensorT<T> v) {
  Node n;
  n.value = std::move(v);
  return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::param(ParamT<T>& p) {
  Node n;
  n.value = p.value;  // copy so later optimizer steps do not alter recorded values
  n.needs_grad = true;
  ParamT<T>* pp = &p;
  Var v = push(std::move(n));
  nodes_[static_cast<size_t>(v)].back = [pp, v](TapeT& tp) {
    const TensorT<T>& g = tp.nodes_[static_cast<size_t>(v)].grad;
    for (int64_t i = 0; i < g.numel(); ++i)
      pp->grad.data[static_cast<size_t>(i)] += g.data[static_cast<size_t>(i)];
  };
  return v;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::conv2d(Var x, Var w, Var b, int stride, int pad) {
  const TensorT<T>& xv = val(x);
  const TensorT<T>& wv = val(w);
  const TensorT<T>& bv = val(b);
  if (xv.ndim() != 4 || wv.ndim() != 4) throw std::invalid_argument("conv2d: want 4-d x and w");
  const int N = xv.dim(0), C = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
  const int F = wv.dim(0), KH = wv.dim(2), KW = wv.dim(3);
  if (wv.dim(1) != C) throw std::invalid_argument("conv2d: channel mismatch");
  if (bv.numel() != F) throw std::invalid_argument("conv2d: bias size mismatch");
  const int OH = out_extent(H, KH, stride, pad), OW = out_extent(W, KW, stride, pad);
  if (OH <= 0 || OW <= 0) throw std::invalid_argument("conv2d: empty output");
  const int CKK = C * KH * KW, area = OH * OW;

  Node n;
  n.value = TensorT<T>({N, F, OH, OW});
  std::vector<T> cols(static_cast<size_t>(CKK) * area);
  for (int s = 0; s < N; ++s) {
    im2col(xv.ptr() + static_cast<size_t>(s) * C * H * W, C, H, W, KH, KW, stride, pad,
           cols.data(), OH, OW);
    T* y = n.value.ptr() + static_cast<size_t>(s) * F * area;
    gemm(false, false, F, area, CKK, T(1), wv.ptr(), CKK, cols.data(), area, T(0), y, area);
    for (int f = 0; f < F; ++f) {
      T bias = bv.data[static_cast<size_t>(f)];
      T* row = y + static_cast<size_t>(f) * area;
      for (int i = 0; i < area; ++i) row[i] += bias;
    }
  }
  n.needs_grad = needs(x) || needs(w) || needs(b);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, w, b, stride, pad, N, C, H, W, F, KH, KW, OH,
                                             OW, CKK, area](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      const TensorT<T>& xv2 = tp.val(x);
      const TensorT<T>& wv2 = tp.val(w);
      std::vector<T> buf(static_cast<size_t>(CKK) * area);
      for (int s = 0; s < N; ++s) {
        const T* dys = dy.ptr() + static_cast<size_t>(s) * F * area;
        if (tp.needs(x)) {
          gemm(true, false, CKK, area, F, T(1), wv2.ptr(), CKK, dys, area, T(0), buf.data(),
               area);
          col2im_add(buf.data(), C, H, W, KH, KW, stride, pad,
                     tp.grad_ref(x).ptr() + static_cast<size_t>(s) * C * H * W, OH, OW);
        }
        if (tp.needs(w)) {
          im2col(xv2.ptr() + static_cast<size_t>(s) * C * H * W, C, H, W, KH, KW, stride, pad,
                 buf.data(), OH, OW);
          gemm(false, true, F, CKK, area, T(1), dys, area, buf.data(), area, T(1),
               tp.grad_ref(w).ptr(), CKK);
        }
        if (tp.needs(b)) {
          T* db = tp.grad_ref(b).ptr();
          for (int f = 0; f < F; ++f) {
            const T* row = dys + static_cast<size_t>(f) * area;
            T acc = 0;
            for (int i = 0; i < area; ++i) acc += row[i];
            db[f] += acc;
          }
        }
      }
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::tconv2d(Var x, Var w, Var b, int stride, int pad) {
  const TensorT<T>& xv = val(x);
  const TensorT<T>& wv = val(w);
  const TensorT<T>& bv = val(b);
  if (xv.ndim() != 4 || wv.ndim() != 4) throw std::invalid_argument("tconv2d: want 4-d x and w");
  const int N = xv.dim(0), C = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
  const int F = wv.dim(1), KH = wv.dim(2), KW = wv.dim(3);
  if (wv.dim(0) != C) throw std::invalid_argument("tconv2d: channel mismatch");
  if (bv.numel() != F) throw std::invalid_argument("tconv2d: bias size mismatch");
  const int OH = (H - 1) * stride - 2 * pad + KH;
  const int OW = (W - 1) * stride - 2 * pad + KW;
  if (OH <= 0 || OW <= 0) throw std::invalid_argument("tconv2d: empty output");
  const int FKK = F * KH * KW, hw = H * W;

  Node n;
  n.value = TensorT<T>({N, F, OH, OW});
  std::vector<T> cols(static_cast<size_t>(FKK) * hw);
  for (int s = 0; s < N; ++s) {
    const T* xs = xv.ptr() + static_cast<size_t>(s) * C * hw;
    gemm(true, false, FKK, hw, C, T(1), wv.ptr(), FKK, xs, hw, T(0), cols.data(), hw);
    T* y = n.value.ptr() + static_cast<size_t>(s) * F * OH * OW;
    col2im_add(cols.data(), F, OH, OW, KH, KW, stride, pad, y, H, W);
    for (int f = 0; f < F; ++f) {
      T bias = bv.data[static_cast<size_t>(f)];
      T* plane = y + static_cast<size_t>(f) * OH * OW;
      for (int i = 0; i < OH * OW; ++i) plane[i] += bias;
    }
  }
  n.needs_grad = needs(x) || needs(w) || needs(b);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, w, b, stride, pad, N, C, H, W, F, KH,
                                             KW, OH, OW, FKK, hw](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      const TensorT<T>& xv2 = tp.val(x);
      const TensorT<T>& wv2 = tp.val(w);
      std::vector<T> buf(static_cast<size_t>(FKK) * hw);
      for (int s = 0; s < N; ++s) {
        const T* dys = dy.ptr() + static_cast<size_t>(s) * F * OH * OW;
        im2col(dys, F, OH, OW, KH, KW, stride, pad, buf.data(), H, W);
        if (tp.needs(x))
          gemm(false, false, C, hw, FKK, T(1), wv2.ptr(), FKK, buf.data(), hw, T(1),
               tp.grad_ref(x).ptr() + static_cast<size_t>(s) * C * hw, hw);
        if (tp.needs(w))
          gemm(false, true, C, FKK, hw, T(1), xv2.ptr() + static_cast<size_t>(s) * C * hw, hw,
               buf.data(), hw, T(1), tp.grad_ref(w).ptr(), FKK);
        if (tp.needs(b)) {
          T* db = tp.grad_ref(b).ptr();
          for (int f = 0; f < F; ++f) {
            const T* plane = dys + static_cast<size_t>(f) * OH * OW;
            T acc = 0;
            for (int i = 0; i < OH * OW; ++i) acc += plane[i];
            db[f] += acc;
          }
        }
      }
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::fc(Var x, Var w, Var b) {
  const TensorT<T>& xv = val(x);
  const TensorT<T>& wv = val(w);
  const TensorT<T>& bv = val(b);
  if (xv.ndim() != 2 || wv.ndim() != 2) throw std::invalid_argument("fc: want 2-d x and w");
  const int N = xv.dim(0), K = xv.dim(1), M = wv.dim(0);
  if (wv.dim(1) != K || bv.numel() != M) throw std::invalid_argument("fc: shape mismatch");

  Node n;
  n.value = TensorT<T>({N, M});
  gemm(false, true, N, M, K, T(1), xv.ptr(), K, wv.ptr(), K, T(0), n.value.ptr(), M);
  for (int s = 0; s < N; ++s)
    for (int m = 0; m < M; ++m) n.value.data[static_cast<size_t>(s) * M + m] += bv.data[static_cast<size_t>(m)];
  n.needs_grad = needs(x) || needs(w) || needs(b);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, w, b, N, K, M](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      if (tp.needs(x))
        gemm(false, false, N, K, M, T(1), dy.ptr(), M, tp.val(w).ptr(), K, T(1),
             tp.grad_ref(x).ptr(), K);
      if (tp.needs(w))
        gemm(true, false, M, K, N, T(1), dy.ptr(), M, tp.val(x).ptr(), K, T(1),
             tp.grad_ref(w).ptr(), K);
      if (tp.needs(b)) {
        T* db = tp.grad_ref(b).ptr();
        for (int s = 0; s < N; ++s)
          for (int m = 0; m < M; ++m) db[m] += dy.data[static_cast<size_t>(s) * M + m];
      }
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::instance_norm(Var x) {
  const TensorT<T>& xv = val(x);
  if (xv.ndim() != 4) throw std::invalid_argument("instance_norm: want 4-d input");
  const int N = xv.dim(0), C = xv.dim(1), area = xv.dim(2) * xv.dim(3);
  const T eps = static_cast<T>(1e-5);

  Node n;
  n.value = TensorT<T>(xv.shape);
  std::vector<T> inv(static_cast<size_t>(N) * C);
  for (int p = 0; p < N * C; ++p) {
    const T* src = xv.ptr() + static_cast<size_t>(p) * area;
    T* dst = n.value.ptr() + static_cast<size_t>(p) * area;
    T mean = 0;
    for (int i = 0; i < area; ++i) mean += src[i];
    mean /= static_cast<T>(area);
    T var = 0;
    for (int i = 0; i < area; ++i) {
      T d = src[i] - mean;
      var += d * d;
    }
    var /= static_cast<T>(area);
    T iv = T(1) / std::sqrt(var + eps);
    inv[static_cast<size_t>(p)] = iv;
    for (int i = 0; i < area; ++i) dst[i] = (src[i] - mean) * iv;
  }
  n.needs_grad = needs(x);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, N, C, area,
                                             inv = std::move(inv)](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      const TensorT<T>& y = tp.val(out);
      T* dx = tp.grad_ref(x).ptr();
      for (int p = 0; p < N * C; ++p) {
        const T* gy = dy.ptr() + static_cast<size_t>(p) * area;
        const T* yy = y.ptr() + static_cast<size_t>(p) * area;
        T m1 = 0, m2 = 0;
        for (int i = 0; i < area; ++i) {
          m1 += gy[i];
          m2 += gy[i] * yy[i];
        }
        m1 /= static_cast<T>(area);
        m2 /= static_cast<T>(area);
        T iv = inv[static_cast<size_t>(p)];
        T* dxp = dx + static_cast<size_t>(p) * area;
        for (int i = 0; i < area; ++i) dxp[i] += iv * (gy[i] - m1 - yy[i] * m2);
      }
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::relu(Var x) {
  return leaky_relu(x, T(0));
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::leaky_relu(Var x, T slope) {
  const TensorT<T>& xv = val(x);
  Node n;
  n.value = TensorT<T>(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i) {
    T v = xv.data[static_cast<size_t>(i)];
    n.value.data[static_cast<size_t>(i)] = v > 0 ? v : slope * v;
  }
  n.needs_grad = needs(x);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, slope](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      const TensorT<T>& xv2 = tp.val(x);
      T* dx = tp.grad_ref(x).ptr();
      for (int64_t i = 0; i < dy.numel(); ++i)
        dx[i] += dy.data[static_cast<size_t>(i)] *
                 (xv2.data[static_cast<size_t>(i)] > 0 ? T(1) : slope);
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::tanh_(Var x) {
  const TensorT<T>& xv = val(x);
  Node n;
  n.value = TensorT<T>(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i)
    n.value.data[static_cast<size_t>(i)] = std::tanh(xv.data[static_cast<size_t>(i)]);
  n.needs_grad = needs(x);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      const TensorT<T>& y = tp.val(out);
      T* dx = tp.grad_ref(x).ptr();
      for (int64_t i = 0; i < dy.numel(); ++i) {
        T t = y.data[static_cast<size_t>(i)];
        dx[i] += dy.data[static_cast<size_t>(i)] * (T(1) - t * t);
      }
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::add(Var a, Var b) {
  const TensorT<T>& av = val(a);
  const TensorT<T>& bv = val(b);
  if (!av.same_shape(bv)) throw std::invalid_argument("add: shape mismatch");
  Node n;
  n.value = TensorT<T>(av.shape);
  for (int64_t i = 0; i < av.numel(); ++i)
    n.value.data[static_cast<size_t>(i)] =
        av.data[static_cast<size_t>(i)] + bv.data[static_cast<size_t>(i)];
  n.needs_grad = needs(a) || needs(b);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, a, b](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      if (tp.needs(a)) {
        T* da = tp.grad_ref(a).ptr();
        for (int64_t i = 0; i < dy.numel(); ++i) da[i] += dy.data[static_cast<size_t>(i)];
      }
      if (tp.needs(b)) {
        T* db = tp.grad_ref(b).ptr();
        for (int64_t i = 0; i < dy.numel(); ++i) db[i] += dy.data[static_cast<size_t>(i)];
      }
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::scale(Var x, T s) {
  const TensorT<T>& xv = val(x);
  Node n;
  n.value = TensorT<T>(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i)
    n.value.data[static_cast<size_t>(i)] = s * xv.data[static_cast<size_t>(i)];
  n.needs_grad = needs(x);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, s](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      T* dx = tp.grad_ref(x).ptr();
      for (int64_t i = 0; i < dy.numel(); ++i) dx[i] += s * dy.data[static_cast<size_t>(i)];
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::coord_channels(Var x) {
  const TensorT<T>& xv = val(x);
  if (xv.ndim() != 4) throw std::invalid_argument("coord_channels: want 4-d input");
  const int N = xv.dim(0), C = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
  Node n;
  n.value = TensorT<T>({N, C + 2, H, W});
  for (int s = 0; s < N; ++s) {
    std::memcpy(n.value.ptr() + static_cast<size_t>(s) * (C + 2) * H * W,
                xv.ptr() + static_cast<size_t>(s) * C * H * W, sizeof(T) * C * H * W);
    T* cx = n.value.ptr() + (static_cast<size_t>(s) * (C + 2) + C) * H * W;
    T* cy = n.value.ptr() + (static_cast<size_t>(s) * (C + 2) + C + 1) * H * W;
    for (int h = 0; h < H; ++h)
      for (int w = 0; w < W; ++w) {
        cx[h * W + w] = W > 1 ? static_cast<T>(-1.0 + 2.0 * w / (W - 1)) : T(0);
        cy[h * W + w] = H > 1 ? static_cast<T>(-1.0 + 2.0 * h / (H - 1)) : T(0);
      }
  }
  n.needs_grad = needs(x);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, N, C, H, W](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      T* dx = tp.grad_ref(x).ptr();
      for (int s = 0; s < N; ++s) {
        const T* src = dy.ptr() + static_cast<size_t>(s) * (C + 2) * H * W;
        T* dst = dx + static_cast<size_t>(s) * C * H * W;
        for (int64_t i = 0; i < static_cast<int64_t>(C) * H * W; ++i) dst[i] += src[i];
      }
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::global_avg_pool(Var x) {
  const TensorT<T>& xv = val(x);
  if (xv.ndim() != 4) throw std::invalid_argument("global_avg_pool: want 4-d input");
  const int N = xv.dim(0), C = xv.dim(1), area = xv.dim(2) * xv.dim(3);
  Node n;
  n.value = TensorT<T>({N, C});
  for (int p = 0; p < N * C; ++p) {
    const T* src = xv.ptr() + static_cast<size_t>(p) * area;
    T acc = 0;
    for (int i = 0; i < area; ++i) acc += src[i];
    n.value.data[static_cast<size_t>(p)] = acc / static_cast<T>(area);
  }
  n.needs_grad = needs(x);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, N, C, area](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      T* dx = tp.grad_ref(x).ptr();
      for (int p = 0; p < N * C; ++p) {
        T g = dy.data[static_cast<size_t>(p)] / static_cast<T>(area);
        T* dst = dx + static_cast<size_t>(p) * area;
        for (int i = 0; i < area; ++i) dst[i] += g;
      }
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::avg_pool2(Var x) {
  const TensorT<T>& xv = val(x);
  if (xv.ndim() != 4) throw std::invalid_argument("avg_pool2: want 4-d input");
  const int N = xv.dim(0), C = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
  if (H % 2 || W % 2) throw std::invalid_argument("avg_pool2: extents must be even");
  const int OH = H / 2, OW = W / 2;
  Node n;
  n.value = TensorT<T>({N, C, OH, OW});
  for (int p = 0; p < N * C; ++p) {
    const T* src = xv.ptr() + static_cast<size_t>(p) * H * W;
    T* dst = n.value.ptr() + static_cast<size_t>(p) * OH * OW;
    for (int oh = 0; oh < OH; ++oh)
      for (int ow = 0; ow < OW; ++ow) {
        const T* s0 = src + (2 * oh) * W + 2 * ow;
        dst[oh * OW + ow] = (s0[0] + s0[1] + s0[W] + s0[W + 1]) * T(0.25);
      }
  }
  n.needs_grad = needs(x);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, N, C, H, W, OH, OW](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      T* dx = tp.grad_ref(x).ptr();
      for (int p = 0; p < N * C; ++p) {
        const T* src = dy.ptr() + static_cast<size_t>(p) * OH * OW;
        T* dst = dx + static_cast<size_t>(p) * H * W;
        for (int oh = 0; oh < OH; ++oh)
          for (int ow = 0; ow < OW; ++ow) {
            T g = src[oh * OW + ow] * T(0.25);
            T* d0 = dst + (2 * oh) * W + 2 * ow;
            d0[0] += g;
            d0[1] += g;
            d0[W] += g;
            d0[W + 1] += g;
          }
      }
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::add_noise(Var x, Rng& rng) {
  const TensorT<T>& xv = val(x);
  Node n;
  n.value = TensorT<T>(xv.shape);
  for (int64_t i = 0; i < xv.numel(); ++i)
    n.value.data[static_cast<size_t>(i)] =
        xv.data[static_cast<size_t>(i)] + static_cast<T>(rng.normal());
  n.needs_grad = needs(x);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      T* dx = tp.grad_ref(x).ptr();
      for (int64_t i = 0; i < dy.numel(); ++i) dx[i] += dy.data[static_cast<size_t>(i)];
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::detach(Var x) {
  Node n;
  n.value = val(x);
  return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::grad_reverse(Var x, T lambda) {
  Node n;
  n.value = val(x);
  n.needs_grad = needs(x);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, lambda](TapeT& tp) {
      const TensorT<T>& dy = tp.nodes_[static_cast<size_t>(out)].grad;
      T* dx = tp.grad_ref(x).ptr();
      for (int64_t i = 0; i < dy.numel(); ++i) dx[i] -= lambda * dy.data[static_cast<size_t>(i)];
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::l1_mean(Var a, Var b) {
  const TensorT<T>& av = val(a);
  const TensorT<T>& bv = val(b);
  if (!av.same_shape(bv)) throw std::invalid_argument("l1_mean: shape mismatch");
  const int64_t count = av.numel();
  Node n;
  T acc = 0;
  for (int64_t i = 0; i < count; ++i)
    acc += std::abs(av.data[static_cast<size_t>(i)] - bv.data[static_cast<size_t>(i)]);
  n.value = TensorT<T>::scalar(acc / static_cast<T>(count));
  n.needs_grad = needs(a) || needs(b);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, a, b, count](TapeT& tp) {
      const T g = tp.nodes_[static_cast<size_t>(out)].grad.data[0] / static_cast<T>(count);
      const TensorT<T>& av2 = tp.val(a);
      const TensorT<T>& bv2 = tp.val(b);
      for (int64_t i = 0; i < count; ++i) {
        T d = av2.data[static_cast<size_t>(i)] - bv2.data[static_cast<size_t>(i)];
        T s = d > 0 ? g : (d < 0 ? -g : T(0));
        if (tp.needs(a)) tp.grad_ref(a).data[static_cast<size_t>(i)] += s;
        if (tp.needs(b)) tp.grad_ref(b).data[static_cast<size_t>(i)] -= s;
      }
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::mse_const(Var x, T target) {
  const TensorT<T>& xv = val(x);
  const int64_t count = xv.numel();
  Node n;
  T acc = 0;
  for (int64_t i = 0; i < count; ++i) {
    T d = xv.data[static_cast<size_t>(i)] - target;
    acc += d * d;
  }
  n.value = TensorT<T>::scalar(acc / static_cast<T>(count));
  n.needs_grad = needs(x);
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, x, target, count](TapeT& tp) {
      const T g = T(2) * tp.nodes_[static_cast<size_t>(out)].grad.data[0] / static_cast<T>(count);
      const TensorT<T>& xv2 = tp.val(x);
      T* dx = tp.grad_ref(x).ptr();
      for (int64_t i = 0; i < count; ++i)
        dx[i] += g * (xv2.data[static_cast<size_t>(i)] - target);
    };
  }
  return out;
}

template <typename T>
typename TapeT<T>::Var TapeT<T>::wsum(const std::vector<std::pair<T, Var>>& terms) {
  Node n;
  T acc = 0;
  bool ng = false;
  for (auto& [wgt, v] : terms) {
    acc += wgt * scalar(v);
    ng = ng || needs(v);
  }
  n.value = TensorT<T>::scalar(acc);
  n.needs_grad = ng;
  Var out = push(std::move(n));
  if (nodes_[static_cast<size_t>(out)].needs_grad) {
    nodes_[static_cast<size_t>(out)].back = [out, terms](TapeT& tp) {
      const T g = tp.nodes_[static_cast<size_t>(out)].grad.data[0];
      for (auto& [wgt, v] : terms)
        if (tp.needs(v)) tp.grad_ref(v).data[0] += wgt * g;
    };
  }
  return out;
}

template <typename T>
void TapeT<T>::backward(Var root) {
  if (backward_done_) throw std::logic_error("tape: backward already ran; build a fresh tape");
  backward_done_ = true;
  if (val(root).numel() != 1) throw std::logic_error("tape: backward root must be scalar");
  grad_ref(root).data[0] = T(1);
  for (Var v = root; v >= 0; --v) {
    Node& n = nodes_[static_cast<size_t>(v)];
    if (n.has_grad && n.back) n.back(*this);
  }
}

template class ParamStoreT<float>;
template class ParamStoreT<double>;
template class TapeT<float>;
template class TapeT<double>;

}  // namespace simgap
