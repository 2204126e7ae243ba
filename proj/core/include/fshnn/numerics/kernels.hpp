// Copyright 2026 The FSHNN Authors
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

#pragma once

// Layer kernels shared by the ANN reference path and the SNN simulator.
// Everything here is a pure function over tensors; the templates are
// instantiated for float (simulation) and double (gradient oracles).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "fshnn/numerics/tensor.hpp"

namespace fshnn {

inline std::size_t conv_output_extent(std::size_t in, std::size_t k,
                                      std::size_t stride,
                                      std::size_t padding) {
  if (stride == 0) throw DimensionError("conv stride must be >= 1");
  if (k > in + 2 * padding) {
    throw DimensionError("conv kernel " + std::to_string(k) +
                         " larger than padded input " +
                         std::to_string(in + 2 * padding));
  }
  return (in + 2 * padding - k) / stride + 1;
}

// Cross-correlation (no kernel flip).
// input [C_in,H,W], kernel [C_out,C_in,k,k] -> [C_out,H',W'].
template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input,
                              const BasicTensor<T>& kernel, std::size_t stride,
                              std::size_t padding) {
  if (input.rank() != 3 || kernel.rank() != 4) {
    throw DimensionError("conv2d expects input [C,H,W] and kernel [O,C,k,k]");
  }
  const std::size_t c_in = input.dim(0), h = input.dim(1), w = input.dim(2);
  const std::size_t c_out = kernel.dim(0), k = kernel.dim(2);
  if (kernel.dim(1) != c_in || kernel.dim(3) != k) {
    throw DimensionError("conv2d kernel " + shape_string(kernel.shape()) +
                         " incompatible with input " +
                         shape_string(input.shape()));
  }
  const std::size_t oh = conv_output_extent(h, k, stride, padding);
  const std::size_t ow = conv_output_extent(w, k, stride, padding);
  BasicTensor<T> out(Shape{c_out, oh, ow});
  const auto ph = static_cast<std::ptrdiff_t>(padding);
  for (std::size_t o = 0; o < c_out; ++o) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        T acc{0};
        for (std::size_t c = 0; c < c_in; ++c) {
          for (std::size_t ky = 0; ky < k; ++ky) {
            const auto iy = static_cast<std::ptrdiff_t>(y * stride + ky) - ph;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t kx = 0; kx < k; ++kx) {
              const auto ix =
                  static_cast<std::ptrdiff_t>(x * stride + kx) - ph;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
              acc += kernel.at(o, c, ky, kx) *
                     input.at(c, static_cast<std::size_t>(iy),
                              static_cast<std::size_t>(ix));
            }
          }
        }
        out.at(o, y, x) = acc;
      }
    }
  }
  return out;
}

// Gradient of a conv2d w.r.t. its input, given the gradient w.r.t. its
// output. Accumulates in the output element type.
template <typename Acc, typename W>
BasicTensor<Acc> conv2d_backward_input(const BasicTensor<Acc>& grad_out,
                                       const BasicTensor<W>& kernel,
                                       const Shape& input_shape,
                                       std::size_t stride,
                                       std::size_t padding) {
  const std::size_t c_in = input_shape[0], h = input_shape[1],
                    w = input_shape[2];
  const std::size_t c_out = kernel.dim(0), k = kernel.dim(2);
  const std::size_t oh = grad_out.dim(1), ow = grad_out.dim(2);
  BasicTensor<Acc> grad_in(input_shape);
  const auto ph = static_cast<std::ptrdiff_t>(padding);
  for (std::size_t o = 0; o < c_out; ++o) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        const Acc g = grad_out.at(o, y, x);
        if (g == Acc{0}) continue;
        for (std::size_t c = 0; c < c_in; ++c) {
          for (std::size_t ky = 0; ky < k; ++ky) {
            const auto iy = static_cast<std::ptrdiff_t>(y * stride + ky) - ph;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t kx = 0; kx < k; ++kx) {
              const auto ix =
                  static_cast<std::ptrdiff_t>(x * stride + kx) - ph;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
              grad_in.at(c, static_cast<std::size_t>(iy),
                         static_cast<std::size_t>(ix)) +=
                  g * static_cast<Acc>(kernel.at(o, c, ky, kx));
            }
          }
        }
      }
    }
  }
  return grad_in;
}

// Accumulates d(out)/d(kernel) contracted with grad_out into grad_kernel.
template <typename Acc, typename In>
void conv2d_accumulate_weight_grad(const BasicTensor<Acc>& grad_out,
                                   const BasicTensor<In>& input,
                                   std::size_t stride, std::size_t padding,
                                   BasicTensor<Acc>& grad_kernel) {
  const std::size_t c_in = input.dim(0), h = input.dim(1), w = input.dim(2);
  const std::size_t c_out = grad_kernel.dim(0), k = grad_kernel.dim(2);
  const std::size_t oh = grad_out.dim(1), ow = grad_out.dim(2);
  const auto ph = static_cast<std::ptrdiff_t>(padding);
  for (std::size_t o = 0; o < c_out; ++o) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        const Acc g = grad_out.at(o, y, x);
        if (g == Acc{0}) continue;
        for (std::size_t c = 0; c < c_in; ++c) {
          for (std::size_t ky = 0; ky < k; ++ky) {
            const auto iy = static_cast<std::ptrdiff_t>(y * stride + ky) - ph;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t kx = 0; kx < k; ++kx) {
              const auto ix =
                  static_cast<std::ptrdiff_t>(x * stride + kx) - ph;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
              grad_kernel.at(o, c, ky, kx) +=
                  g * static_cast<Acc>(input.at(c, static_cast<std::size_t>(iy),
                                                static_cast<std::size_t>(ix)));
            }
          }
        }
      }
    }
  }
}

// y = W x (+ b). The input may have any shape; it is read flat.
template <typename T>
BasicTensor<T> fc_forward(const BasicTensor<T>& input,
                          const BasicTensor<T>& weights,
                          const BasicTensor<T>* bias = nullptr) {
  if (weights.rank() != 2 || weights.dim(1) != input.size()) {
    throw DimensionError("fc weights " + shape_string(weights.shape()) +
                         " incompatible with input of length " +
                         std::to_string(input.size()));
  }
  const std::size_t m = weights.dim(0), n = weights.dim(1);
  if (bias && bias->size() != m) {
    throw DimensionError("fc bias length " + std::to_string(bias->size()) +
                         " != " + std::to_string(m));
  }
  BasicTensor<T> out(Shape{m});
  for (std::size_t i = 0; i < m; ++i) {
    T acc = bias ? (*bias)[i] : T{0};
    const T* row = weights.data().data() + i * n;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * input[j];
    out[i] = acc;
  }
  return out;
}

// x_grad = W^T g, shaped like the forward input.
template <typename Acc, typename W>
BasicTensor<Acc> fc_backward_input(const BasicTensor<Acc>& grad_out,
                                   const BasicTensor<W>& weights,
                                   const Shape& input_shape) {
  const std::size_t m = weights.dim(0), n = weights.dim(1);
  BasicTensor<Acc> grad_in(input_shape);
  for (std::size_t i = 0; i < m; ++i) {
    const Acc g = grad_out[i];
    if (g == Acc{0}) continue;
    for (std::size_t j = 0; j < n; ++j) {
      grad_in[j] += g * static_cast<Acc>(weights.at(i, j));
    }
  }
  return grad_in;
}

// grad_w += g x^T
template <typename Acc, typename In>
void fc_accumulate_weight_grad(const BasicTensor<Acc>& grad_out,
                               const BasicTensor<In>& input,
                               BasicTensor<Acc>& grad_weights) {
  const std::size_t m = grad_weights.dim(0), n = grad_weights.dim(1);
  for (std::size_t i = 0; i < m; ++i) {
    const Acc g = grad_out[i];
    if (g == Acc{0}) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (input[j] != In{0}) {
        grad_weights.at(i, j) += g * static_cast<Acc>(input[j]);
      }
    }
  }
}

// input [C,H,W] -> [C,H/window,W/window], arithmetic mean per window.
template <typename T>
BasicTensor<T> avgpool2d(const BasicTensor<T>& input, std::size_t window) {
  if (input.rank() != 3) throw DimensionError("avgpool2d expects [C,H,W]");
  if (window == 0 || input.dim(1) % window || input.dim(2) % window) {
    throw DimensionError("avgpool window " + std::to_string(window) +
                         " does not divide " + shape_string(input.shape()));
  }
  const std::size_t c = input.dim(0), oh = input.dim(1) / window,
                    ow = input.dim(2) / window;
  const T scale = T{1} / static_cast<T>(window * window);
  BasicTensor<T> out(Shape{c, oh, ow});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        T acc{0};
        for (std::size_t dy = 0; dy < window; ++dy) {
          for (std::size_t dx = 0; dx < window; ++dx) {
            acc += input.at(ch, y * window + dy, x * window + dx);
          }
        }
        out.at(ch, y, x) = acc * scale;
      }
    }
  }
  return out;
}

template <typename Acc>
BasicTensor<Acc> avgpool2d_backward(const BasicTensor<Acc>& grad_out,
                                    const Shape& input_shape,
                                    std::size_t window) {
  BasicTensor<Acc> grad_in(input_shape);
  const Acc scale = Acc{1} / static_cast<Acc>(window * window);
  for (std::size_t ch = 0; ch < input_shape[0]; ++ch) {
    for (std::size_t y = 0; y < input_shape[1]; ++y) {
      for (std::size_t x = 0; x < input_shape[2]; ++x) {
        grad_in.at(ch, y, x) = grad_out.at(ch, y / window, x / window) * scale;
      }
    }
  }
  return grad_in;
}

// Plain max-pool for the ANN reference path.
template <typename T>
BasicTensor<T> maxpool2d(const BasicTensor<T>& input, std::size_t window) {
  if (input.rank() != 3) throw DimensionError("maxpool2d expects [C,H,W]");
  if (window == 0 || input.dim(1) % window || input.dim(2) % window) {
    throw DimensionError("maxpool window " + std::to_string(window) +
                         " does not divide " + shape_string(input.shape()));
  }
  const std::size_t c = input.dim(0), oh = input.dim(1) / window,
                    ow = input.dim(2) / window;
  BasicTensor<T> out(Shape{c, oh, ow});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        T best = input.at(ch, y * window, x * window);
        for (std::size_t dy = 0; dy < window; ++dy) {
          for (std::size_t dx = 0; dx < window; ++dx) {
            best = std::max(best, input.at(ch, y * window + dy, x * window + dx));
          }
        }
        out.at(ch, y, x) = best;
      }
    }
  }
  return out;
}

// Max-shifted softmax.
template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& logits) {
  if (logits.empty()) throw DimensionError("softmax of an empty tensor");
  T peak = logits[0];
  for (auto v : logits.data()) {
    if (std::isnan(v)) throw NumericError("softmax input contains NaN");
    peak = std::max(peak, v);
  }
  if (!std::isfinite(peak)) throw NumericError("softmax input is not finite");
  BasicTensor<T> out(logits.shape());
  T total{0};
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (auto& v : out.data()) v /= total;
  return out;
}

// log(sum(exp(x))) without overflow.
template <typename T>
T log_sum_exp(const BasicTensor<T>& logits) {
  T peak = logits[0];
  for (auto v : logits.data()) peak = std::max(peak, v);
  T total{0};
  for (auto v : logits.data()) total += std::exp(v - peak);
  return peak + std::log(total);
}

// Central differences (f(x+h e_i) - f(x-h e_i)) / 2h, one coordinate at a
// time. Test oracle for every hand-derived gradient.
template <typename T>
BasicTensor<T> finite_difference_gradient(
    const std::function<T(const BasicTensor<T>&)>& f, const BasicTensor<T>& x,
    T h) {
  BasicTensor<T> grad(x.shape());
  BasicTensor<T> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T original = probe[i];
    probe[i] = original + h;
    const T up = f(probe);
    probe[i] = original - h;
    const T down = f(probe);
    probe[i] = original;
    grad[i] = (up - down) / (T{2} * h);
  }
  return grad;
}

}  // namespace fshnn
