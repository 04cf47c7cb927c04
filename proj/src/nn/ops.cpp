// Copyright 2026 The horizonseg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hseg/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include <Eigen/Core>

namespace hseg::nn {
namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMatrix<T>>;

struct ConvGeometry {
  std::size_t batch, channels, height, width;
  std::size_t filters, kernel, stride, padding;
  std::size_t out_h, out_w;

  std::size_t patch() const { return channels * kernel * kernel; }
  std::size_t pixels() const { return out_h * out_w; }
};

// Unfolds one (C, H, W) image into a (C*k*k, out_h*out_w) row-major matrix.
template <typename T>
void im2col(const T* image, const ConvGeometry& g, T* col) {
  const long pad = static_cast<long>(g.padding);
  const long h = static_cast<long>(g.height), w = static_cast<long>(g.width);
  const std::size_t ow = g.out_w;
  for (std::size_t c = 0; c < g.channels; ++c) {
    const T* plane = image + c * g.height * g.width;
    for (std::size_t ki = 0; ki < g.kernel; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel; ++kj) {
        T* row = col + ((c * g.kernel + ki) * g.kernel + kj) * g.pixels();
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          T* dst = row + oy * ow;
          const long iy = static_cast<long>(oy * g.stride + ki) - pad;
          if (iy < 0 || iy >= h) {
            std::fill_n(dst, ow, T{0});
            continue;
          }
          const T* src = plane + iy * w;
          const long shift = static_cast<long>(kj) - pad;
          if (g.stride == 1) {
            // ix = ox + shift must lie in [0, w).
            const long lo = std::clamp(-shift, 0L, static_cast<long>(ow));
            const long hi = std::clamp(w - shift, lo, static_cast<long>(ow));
            std::fill(dst, dst + lo, T{0});
            std::copy(src + lo + shift, src + hi + shift, dst + lo);
            std::fill(dst + hi, dst + ow, T{0});
          } else {
            for (std::size_t ox = 0; ox < ow; ++ox) {
              const long ix = static_cast<long>(ox * g.stride) + shift;
              dst[ox] = (ix >= 0 && ix < w) ? src[ix] : T{0};
            }
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters-adds columns back into the image gradient.
template <typename T>
void col2im_add(const T* col, const ConvGeometry& g, T* image) {
  const long pad = static_cast<long>(g.padding);
  const long h = static_cast<long>(g.height), w = static_cast<long>(g.width);
  const std::size_t ow = g.out_w;
  for (std::size_t c = 0; c < g.channels; ++c) {
    T* plane = image + c * g.height * g.width;
    for (std::size_t ki = 0; ki < g.kernel; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel; ++kj) {
        const T* row = col + ((c * g.kernel + ki) * g.kernel + kj) * g.pixels();
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long iy = static_cast<long>(oy * g.stride + ki) - pad;
          if (iy < 0 || iy >= h) continue;
          const T* src = row + oy * ow;
          T* dst = plane + iy * w;
          const long shift = static_cast<long>(kj) - pad;
          if (g.stride == 1) {
            const long lo = std::clamp(-shift, 0L, static_cast<long>(ow));
            const long hi = std::clamp(w - shift, lo, static_cast<long>(ow));
            for (long ox = lo; ox < hi; ++ox) dst[ox + shift] += src[ox];
          } else {
            for (std::size_t ox = 0; ox < ow; ++ox) {
              const long ix = static_cast<long>(ox * g.stride) + shift;
              if (ix >= 0 && ix < w) dst[ix] += src[ox];
            }
          }
        }
      }
    }
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw RangeError(message);
}

}  // namespace

template <typename T>
Var conv2d(Tape<T>& tape, Var input, Var kernels, Var bias, std::size_t stride,
           std::size_t padding) {
  const auto& x = tape.value(input);
  const auto& w = tape.value(kernels);
  const auto& b = tape.value(bias);
  require(x.rank() == 4, "conv2d: input must be (B, C, H, W), got " + shape_to_string(x.shape()));
  require(w.rank() == 4 && w.dim(2) == w.dim(3),
          "conv2d: kernels must be (F, C, k, k), got " + shape_to_string(w.shape()));
  require(w.dim(2) % 2 == 1, "conv2d: kernel size must be odd");
  require(w.dim(1) == x.dim(1), "conv2d: channel mismatch, input has " +
                                    std::to_string(x.dim(1)) + ", kernels expect " +
                                    std::to_string(w.dim(1)));
  require(b.rank() == 1 && b.dim(0) == w.dim(0), "conv2d: bias must be (F)");
  require(stride >= 1, "conv2d: stride must be >= 1");

  ConvGeometry g{x.dim(0), x.dim(1), x.dim(2), x.dim(3), w.dim(0), w.dim(2), stride, padding, 0, 0};
  require(g.height + 2 * padding >= g.kernel && g.width + 2 * padding >= g.kernel,
          "conv2d: kernel larger than padded input " + shape_to_string(x.shape()));
  g.out_h = (g.height + 2 * padding - g.kernel) / stride + 1;
  g.out_w = (g.width + 2 * padding - g.kernel) / stride + 1;

  NdArray<T> out({g.batch, g.filters, g.out_h, g.out_w});
  RowMatrix<T> col(g.patch(), g.pixels());
  const ConstMatMap<T> wm(w.raw(), g.filters, g.patch());
  const Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> bv(b.raw(), g.filters);
  const std::size_t in_item = g.channels * g.height * g.width;
  const std::size_t out_item = g.filters * g.pixels();
  for (std::size_t n = 0; n < g.batch; ++n) {
    im2col(x.raw() + n * in_item, g, col.data());
    MatMap<T> om(out.raw() + n * out_item, g.filters, g.pixels());
    om.noalias() = wm * col;
    om.colwise() += bv;
  }

  return tape.record(std::move(out), {input, kernels, bias},
                     [=, result = Var{tape.size()}](Tape<T>& t) {
    const auto& gout = t.grad(result);
    const auto& xv = t.value(input);
    const auto& wv = t.value(kernels);
    const bool need_x = t.requires_grad(input);
    const bool need_w = t.requires_grad(kernels);
    const bool need_b = t.requires_grad(bias);
    RowMatrix<T> col(g.patch(), g.pixels());
    RowMatrix<T> dcol;
    RowMatrix<T> dw = RowMatrix<T>::Zero(g.filters, g.patch());
    Eigen::Matrix<T, Eigen::Dynamic, 1> db = Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(g.filters);
    const ConstMatMap<T> wm(wv.raw(), g.filters, g.patch());
    NdArray<T>* dx = need_x ? &t.grad(input) : nullptr;
    for (std::size_t n = 0; n < g.batch; ++n) {
      const ConstMatMap<T> gm(gout.raw() + n * out_item, g.filters, g.pixels());
      if (need_w) {
        im2col(xv.raw() + n * in_item, g, col.data());
        dw.noalias() += gm * col.transpose();
      }
      if (need_b) db += gm.rowwise().sum();
      if (need_x) {
        dcol.noalias() = wm.transpose() * gm;
        col2im_add(dcol.data(), g, dx->raw() + n * in_item);
      }
    }
    if (need_w) {
      auto& gw = t.grad(kernels);
      MatMap<T>(gw.raw(), g.filters, g.patch()) += dw;
    }
    if (need_b) {
      auto& gb = t.grad(bias);
      for (std::size_t f = 0; f < g.filters; ++f) gb[f] += db(f);
    }
  });
}

template <typename T>
Var upsample2x(Tape<T>& tape, Var input) {
  const auto& x = tape.value(input);
  require(x.rank() == 4, "upsample2x: input must be (B, C, H, W)");
  const std::size_t planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  NdArray<T> out({x.dim(0), x.dim(1), 2 * h, 2 * w});
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = x.raw() + p * h * w;
    T* dst = out.raw() + p * 4 * h * w;
    for (std::size_t r = 0; r < h; ++r) {
      T* row0 = dst + (2 * r) * 2 * w;
      for (std::size_t c = 0; c < w; ++c) row0[2 * c] = row0[2 * c + 1] = src[r * w + c];
      std::copy(row0, row0 + 2 * w, row0 + 2 * w);
    }
  }
  return tape.record(std::move(out), {input}, [=, result = Var{tape.size()}](Tape<T>& t) {
    const auto& gout = t.grad(result);
    auto& gx = t.grad(input);
    for (std::size_t p = 0; p < planes; ++p) {
      const T* src = gout.raw() + p * 4 * h * w;
      T* dst = gx.raw() + p * h * w;
      for (std::size_t r = 0; r < h; ++r) {
        const T* a = src + (2 * r) * 2 * w;
        const T* b = a + 2 * w;
        for (std::size_t c = 0; c < w; ++c) {
          dst[r * w + c] += (a[2 * c] + a[2 * c + 1]) + (b[2 * c] + b[2 * c + 1]);
        }
      }
    }
  });
}

template <typename T>
Var activation(Tape<T>& tape, Var input, Activation kind) {
  const auto& x = tape.value(input);
  NdArray<T> out(x.shape());
  if (kind == Activation::Relu) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > T{0} ? x[i] : T{0};
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const T v = x[i];
      const T y = v >= T{0} ? T{1} / (T{1} + std::exp(-v)) : std::exp(v) / (T{1} + std::exp(v));
      // Keep the output strictly inside (0, 1) once it saturates.
      out[i] = std::clamp(y, std::numeric_limits<T>::min(),
                          T{1} - std::numeric_limits<T>::epsilon() / 2);
    }
  }
  return tape.record(std::move(out), {input}, [=, result = Var{tape.size()}](Tape<T>& t) {
    const auto& gout = t.grad(result);
    auto& gx = t.grad(input);
    if (kind == Activation::Relu) {
      const auto& xv = t.value(input);
      for (std::size_t i = 0; i < gx.size(); ++i) {
        if (xv[i] > T{0}) gx[i] += gout[i];
      }
    } else {
      const auto& y = t.value(result);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gout[i] * y[i] * (T{1} - y[i]);
    }
  });
}

template <typename T>
Var concat_channels(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  require(av.rank() == 4 && bv.rank() == 4 && av.dim(0) == bv.dim(0) &&
              av.dim(2) == bv.dim(2) && av.dim(3) == bv.dim(3),
          "concat_channels: incompatible shapes " + shape_to_string(av.shape()) + " and " +
              shape_to_string(bv.shape()));
  const std::size_t batch = av.dim(0);
  const std::size_t na = av.size() / batch, nb = bv.size() / batch;
  NdArray<T> out({batch, av.dim(1) + bv.dim(1), av.dim(2), av.dim(3)});
  for (std::size_t n = 0; n < batch; ++n) {
    std::copy_n(av.raw() + n * na, na, out.raw() + n * (na + nb));
    std::copy_n(bv.raw() + n * nb, nb, out.raw() + n * (na + nb) + na);
  }
  return tape.record(std::move(out), {a, b}, [=, result = Var{tape.size()}](Tape<T>& t) {
    const auto& gout = t.grad(result);
    if (t.requires_grad(a)) {
      auto& ga = t.grad(a);
      for (std::size_t n = 0; n < batch; ++n) {
        for (std::size_t i = 0; i < na; ++i) ga[n * na + i] += gout[n * (na + nb) + i];
      }
    }
    if (t.requires_grad(b)) {
      auto& gb = t.grad(b);
      for (std::size_t n = 0; n < batch; ++n) {
        for (std::size_t i = 0; i < nb; ++i) gb[n * nb + i] += gout[n * (na + nb) + na + i];
      }
    }
  });
}

template <typename T>
Var dice_loss(Tape<T>& tape, Var pred, const NdArray<T>& target, double smooth) {
  const auto& p = tape.value(pred);
  require(p.shape() == target.shape(), "dice_loss: prediction " + shape_to_string(p.shape()) +
                                           " and target " + shape_to_string(target.shape()) +
                                           " differ in shape");
  if (!(smooth > 0.0)) throw ConfigError("dice_loss: smooth must be positive");
  double inter = 0.0, psum = 0.0, tsum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    inter += static_cast<double>(p[i]) * static_cast<double>(target[i]);
    psum += static_cast<double>(p[i]);
    tsum += static_cast<double>(target[i]);
  }
  const double num = 2.0 * inter + smooth;
  const double den = psum + tsum + smooth;
  NdArray<T> out({1}, static_cast<T>(1.0 - num / den));
  return tape.record(std::move(out), {pred},
                     [=, target = target, result = Var{tape.size()}](Tape<T>& t) {
    const double g = static_cast<double>(t.grad(result)[0]);
    auto& gp = t.grad(pred);
    // d/dp_i of -(num/den) = -(2 t_i den - num) / den^2
    const double base = num / (den * den);
    const double scale = 2.0 / den;
    for (std::size_t i = 0; i < gp.size(); ++i) {
      gp[i] += static_cast<T>(g * (base - scale * static_cast<double>(target[i])));
    }
  });
}

template <typename T>
Var sum(Tape<T>& tape, Var input) {
  const auto& x = tape.value(input);
  T acc{0};
  for (T v : x.data()) acc += v;
  return tape.record(NdArray<T>({1}, acc), {input}, [=, result = Var{tape.size()}](Tape<T>& t) {
    const T g = t.grad(result)[0];
    for (auto& v : t.grad(input).data()) v += g;
  });
}

template <typename T>
Var mul(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  require(av.shape() == bv.shape(), "mul: shape mismatch");
  NdArray<T> out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
  return tape.record(std::move(out), {a, b}, [=, result = Var{tape.size()}](Tape<T>& t) {
    const auto& gout = t.grad(result);
    if (t.requires_grad(a)) {
      auto& ga = t.grad(a);
      const auto& bv2 = t.value(b);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gout[i] * bv2[i];
    }
    if (t.requires_grad(b)) {
      auto& gb = t.grad(b);
      const auto& av2 = t.value(a);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gout[i] * av2[i];
    }
  });
}

#define HSEG_INSTANTIATE_OPS(T)                                                      \
  template Var conv2d<T>(Tape<T>&, Var, Var, Var, std::size_t, std::size_t);         \
  template Var upsample2x<T>(Tape<T>&, Var);                                         \
  template Var activation<T>(Tape<T>&, Var, Activation);                             \
  template Var concat_channels<T>(Tape<T>&, Var, Var);                               \
  template Var dice_loss<T>(Tape<T>&, Var, const NdArray<T>&, double);               \
  template Var sum<T>(Tape<T>&, Var);                                                \
  template Var mul<T>(Tape<T>&, Var, Var);

HSEG_INSTANTIATE_OPS(float)
HSEG_INSTANTIATE_OPS(double)

#undef HSEG_INSTANTIATE_OPS

}  // namespace hseg::nn
