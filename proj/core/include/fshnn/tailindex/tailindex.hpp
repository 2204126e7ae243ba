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
#include <functional>
#include <span>
#include <vector>

#include "fshnn/coding/coding.hpp"
#include "fshnn/numerics/rng.hpp"
#include "fshnn/numerics/tensor.hpp"
#include "fshnn/spiking/network.hpp"
#include "fshnn/stdp/stdp.hpp"

namespace fshnn {

// Symmetric alpha-stable draws (Chambers-Mallows-Stuck). alpha = 2 gives
// N(0, 2 sigma^2), alpha = 1 gives Cauchy(sigma).
std::vector<double> sample_alpha_stable(double alpha, double sigma,
                                        std::size_t n, Rng& rng);

// Divisor of K in [2, K/2] closest to sqrt(K), ties to the smaller one.
std::size_t choose_k1(std::size_t K);

struct TailIndexEstimate {
  double alpha_hat = 0.0;
  std::size_t K = 0;
  std::size_t K1 = 0;
  std::size_t K2 = 0;
  std::size_t n_noise_coordinates = 0;
  std::size_t dropped_zeros = 0;
  // alpha_hat outside (0, 2].
  bool out_of_range = false;
};

// Block-sum estimator of 1/alpha over exactly K1*K2 samples. Zero entries
// raise ParameterError.
TailIndexEstimate estimate_tail_index(std::span<const double> x,
                                      std::size_t K1, std::size_t K2);

// Drops zeros, then truncates to K = K1*K2 with K1 near sqrt(n): uses all
// remaining samples when choose_k1 finds a divisor within a factor 2 of
// sqrt(n), otherwise K1 = floor(sqrt(n)) and the tail is discarded.
TailIndexEstimate estimate_tail_index(std::span<const double> x);

// Collects noise over `passes` shuffled partitions of n items into n/b
// minibatches. `batch_vector` maps a minibatch to a flat vector; each
// emitted noise vector is that vector minus `reference`, or minus the pass
// mean of the batch vectors when `reference` is empty.
using BatchVectorFn =
    std::function<std::vector<double>(std::span<const std::size_t>)>;
std::vector<double> collect_minibatch_noise(std::size_t n, std::size_t batch_size,
                                            std::size_t passes, Rng& rng,
                                            const BatchVectorFn& batch_vector,
                                            const std::vector<double>& reference);

struct TwoLayerNet {
  TensorD W;              // [d, m], column r is w_r
  std::vector<double> a;  // +-1, fixed
  double kappa = 1.0;
  std::size_t m = 0;
  std::size_t d = 0;
};

TwoLayerNet init_two_layer(std::size_t d, std::size_t m, double kappa, Rng& rng);

// (1/sqrt m) sum_r a_r relu(w_r . x).
double two_layer_forward(const TwoLayerNet& net, std::span<const double> x);

// Gradient of (1/|S|) sum_{i in S} 0.5 (y_i - f(x_i))^2 w.r.t. W, flattened
// like W. ReLU subgradient at 0 is 0.
std::vector<double> two_layer_gradient(const TwoLayerNet& net,
                                       const std::vector<std::vector<double>>& xs,
                                       const std::vector<double>& ys,
                                       std::span<const std::size_t> subset);

// One full-batch GD step on Phi(W) = 0.5 sum_i (y_i - f(x_i))^2.
void two_layer_gd_step(TwoLayerNet& net, const std::vector<std::vector<double>>& xs,
                       const std::vector<double>& ys, double lr);

// Scales x to unit Euclidean norm (all-zero inputs raise InputError).
std::vector<double> unit_normalize(std::span<const double> x);

// U = grad over minibatch - full gradient, concatenated over K = p n / b
// batches. b must divide n.
std::vector<double> collect_sgd_gradient_noise(
    const TwoLayerNet& net, const std::vector<std::vector<double>>& xs,
    const std::vector<double>& ys, std::size_t batch_size, std::size_t passes,
    Rng& rng);

// Aggregate STDP update of layer `layer` per minibatch, from the current
// weights, minus the pass mean. Inputs are Poisson-encoded.
std::vector<double> collect_stdp_update_noise(
    const NetworkSpec& net, std::size_t layer, const std::vector<Tensor>& data,
    std::size_t batch_size, std::size_t passes, const EncoderParams& encoder,
    const StdpParams& params, Rng& rng);

struct OuProcessSpec {
  std::function<double(double)> log_density_gradient;
  double learning_rate = 0.1;
  double temperature = 1.0;
  double dt = 0.01;
  std::size_t steps = 100000;
  void validate() const;
};

// Euler-Maruyama trajectory of
//   d theta = b grad log p*(theta) dt + sqrt(2 T b) dW,
// including theta0 (length steps + 1). temperature = 0 is allowed.
std::vector<double> simulate_ou_sampling(const OuProcessSpec& spec,
                                         double theta0, Rng& rng);

}  // namespace fshnn
