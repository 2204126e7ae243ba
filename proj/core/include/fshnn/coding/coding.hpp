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

#include <cstddef>

#include "fshnn/numerics/rng.hpp"
#include "fshnn/numerics/tensor.hpp"
#include "fshnn/spiking/spike_train.hpp"

namespace fshnn {

struct EncoderParams {
  // Spike probability per timestep at intensity 1.0.
  double max_rate = 1.0;
  std::size_t steps = 100;

  void validate() const;
};

// Bernoulli(intensity * max_rate) per pixel and timestep, the clock-driven
// form of a Poisson process. Pixels are clipped to [0,1] first.
SpikeTrain poisson_encode(const Tensor& image, const EncoderParams& params,
                          Rng& rng);

// Every frame carries the clipped image itself: a matrix of constant input
// currents instead of spikes.
SpikeTrain constant_current_encode(const Tensor& image, std::size_t steps);

struct DogParams {
  double sigma_center = 1.0;
  double sigma_surround = 2.0;
  double threshold = 0.01;
  std::size_t steps = 100;
};

// Center-surround (Gaussian(sigma_c) - Gaussian(sigma_s)) filter response
// with edge-replicating borders, so a constant image gives exactly zero
// contrast up to rounding. Input [H,W] or [1,H,W]; output [H,W].
TensorD dog_filter(const Tensor& image, double sigma_center,
                   double sigma_surround);

// Latency code over the filter response: channel 0 carries ON (positive)
// contrast, channel 1 OFF (negative). A pixel whose |contrast| reaches the
// threshold spikes once, at step round((steps-1) * (1 - |c| / max|c|));
// stronger contrast spikes earlier. Output frames are [2,H,W].
SpikeTrain dog_encode(const Tensor& image, const DogParams& params);

// argmax of per-class totals; ties resolve to the lowest index.
std::size_t decode_spike_count(const SpikeTrain& output_spikes);

// The accumulated output potential, verbatim, as class/regression scores.
Tensor decode_potential(const Tensor& potential);

// argmax with ties to the lowest index.
std::size_t argmax(const Tensor& scores);

}  // namespace fshnn
