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

#include "fshnn/coding/coding.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fshnn {

void EncoderParams::validate() const {
  if (!(max_rate > 0.0 && max_rate <= 1.0)) {
    throw ParameterError("encoder max_rate must be in (0,1], got " +
                         std::to_string(max_rate));
  }
  if (steps == 0) throw ParameterError("encoder needs at least one timestep");
}

namespace {

float clip_pixel(float v, std::size_t index) {
  if (std::isnan(v)) {
    throw NumericError("NaN pixel at index " + std::to_string(index));
  }
  return std::clamp(v, 0.0f, 1.0f);
}

}  // namespace

SpikeTrain poisson_encode(const Tensor& image, const EncoderParams& params,
                          Rng& rng) {
  params.validate();
  std::vector<double> prob(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    prob[i] = static_cast<double>(clip_pixel(image[i], i)) * params.max_rate;
  }
  SpikeTrain train(image.shape(), params.steps);
  for (std::size_t t = 0; t < params.steps; ++t) {
    Tensor& frame = train.frame(t);
    for (std::size_t i = 0; i < prob.size(); ++i) {
      frame[i] = rng.bernoulli(prob[i]) ? 1.0f : 0.0f;
    }
  }
  return train;
}

SpikeTrain constant_current_encode(const Tensor& image, std::size_t steps) {
  Tensor clipped(image.shape());
  for (std::size_t i = 0; i < image.size(); ++i) {
    clipped[i] = clip_pixel(image[i], i);
  }
  SpikeTrain train(image.shape(), steps);
  for (std::size_t t = 0; t < steps; ++t) train.set_frame(t, clipped);
  return train;
}

namespace {

std::vector<double> gaussian_kernel_1d(double sigma, std::size_t radius) {
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double x = static_cast<double>(i) - static_cast<double>(radius);
    k[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    total += k[i];
  }
  for (auto& v : k) v /= total;
  return k;
}

// Separable Gaussian blur with replicated borders.
std::vector<double> blur(const std::vector<double>& img, std::size_t h,
                         std::size_t w, const std::vector<double>& kernel) {
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const auto clamp_idx = [](std::ptrdiff_t i, std::size_t n) {
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
  };
  std::vector<double> rows(h * w, 0.0), out(h * w, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
        acc += kernel[static_cast<std::size_t>(d + radius)] *
               img[y * w + clamp_idx(static_cast<std::ptrdiff_t>(x) + d, w)];
      }
      rows[y * w + x] = acc;
    }
  }
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
        acc += kernel[static_cast<std::size_t>(d + radius)] *
               rows[clamp_idx(static_cast<std::ptrdiff_t>(y) + d, h) * w + x];
      }
      out[y * w + x] = acc;
    }
  }
  return out;
}

}  // namespace

TensorD dog_filter(const Tensor& image, double sigma_center,
                   double sigma_surround) {
  if (!(sigma_center > 0.0) || !(sigma_surround > sigma_center)) {
    throw ParameterError("DoG needs sigma_surround > sigma_center > 0");
  }
  std::size_t h = 0, w = 0;
  if (image.rank() == 2) {
    h = image.dim(0);
    w = image.dim(1);
  } else if (image.rank() == 3 && image.dim(0) == 1) {
    h = image.dim(1);
    w = image.dim(2);
  } else {
    throw DimensionError("dog_filter expects [H,W] or [1,H,W], got " +
                         shape_string(image.shape()));
  }
  std::vector<double> pixels(image.data().begin(), image.data().end());
  const auto radius =
      static_cast<std::size_t>(std::ceil(3.0 * sigma_surround));
  const auto center = blur(pixels, h, w, gaussian_kernel_1d(sigma_center, radius));
  const auto surround =
      blur(pixels, h, w, gaussian_kernel_1d(sigma_surround, radius));
  TensorD response(Shape{h, w});
  for (std::size_t i = 0; i < response.size(); ++i) {
    response[i] = center[i] - surround[i];
  }
  return response;
}

SpikeTrain dog_encode(const Tensor& image, const DogParams& params) {
  if (params.steps == 0) throw ParameterError("dog_encode needs steps >= 1");
  const TensorD response =
      dog_filter(image, params.sigma_center, params.sigma_surround);
  const std::size_t h = response.dim(0), w = response.dim(1);
  double peak = 0.0;
  for (auto v : response.data()) peak = std::max(peak, std::abs(v));
  SpikeTrain train(Shape{2, h, w}, params.steps);
  if (peak < params.threshold) return train;
  const double span = static_cast<double>(params.steps - 1);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double c = response.at(y, x);
      if (std::abs(c) < params.threshold) continue;
      const auto t = static_cast<std::size_t>(
          std::lround(span * (1.0 - std::abs(c) / peak)));
      train.frame(t).at(c > 0.0 ? 0 : 1, y, x) = 1.0f;
    }
  }
  return train;
}

std::size_t argmax(const Tensor& scores) {
  if (scores.empty()) throw DimensionError("argmax of an empty tensor");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

std::size_t decode_spike_count(const SpikeTrain& output_spikes) {
  return argmax(output_spikes.counts());
}

Tensor decode_potential(const Tensor& potential) { return potential; }

}  // namespace fshnn
