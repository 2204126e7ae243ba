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

#include <climits>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "fshnn/coding/coding.hpp"
#include "fshnn/numerics/kernels.hpp"
#include "fshnn/numerics/rng.hpp"
#include "fshnn/numerics/tensor.hpp"
#include "fshnn/spiking/network.hpp"
#include "fshnn/spiking/simulate.hpp"

namespace fshnn {

struct SurrogateParams {
  double alpha = 0.3;
  double beta = 0.01;

  void validate() const;
};

struct OptimizerParams {
  double learning_rate = 1e-3;
  double momentum = 0.95;
  double weight_decay = 0.0005;
  std::size_t batch_size = 32;

  void validate() const;
};

template <typename T>
struct LossResult {
  T loss{};
  BasicTensor<T> probabilities;
};

// Softmax cross-entropy on the accumulated output potential u^T against a
// one-hot target. The loss is evaluated as logsumexp(u) - u_true so a
// vanishing p_true never reaches log(0).
template <typename T>
LossResult<T> spike_cross_entropy_loss(const BasicTensor<T>& potential,
                                       const BasicTensor<T>& one_hot) {
  require_same_shape(potential.shape(), one_hot.shape(),
                     "spike_cross_entropy_loss");
  std::size_t label = potential.size();
  for (std::size_t i = 0; i < one_hot.size(); ++i) {
    if (one_hot[i] == T{1}) {
      if (label != potential.size()) throw InputError("target is not one-hot");
      label = i;
    } else if (one_hot[i] != T{0}) {
      throw InputError("target is not one-hot");
    }
  }
  if (label == potential.size()) throw InputError("target is not one-hot");
  return {log_sum_exp(potential) - potential[label], softmax(potential)};
}

Tensor one_hot(std::size_t label, std::size_t classes);

// dL/du^T = p - y.
TensorD output_potential_grad(const Tensor& probabilities,
                              const Tensor& one_hot);

// alpha * exp(-beta * dt) with dt = t - t_s clamped to [0, window]; a neuron
// that never fired (t_s == kNeverSpiked) uses dt = t.
double surrogate_spike_grad(int t, int t_s, const SurrogateParams& params,
                            int window = INT_MAX);

// Weight/bias gradients per layer; entries are empty for layers that do not
// train (no weights or not tagged backprop).
struct LayerGradients {
  std::vector<TensorD> weights;
  std::vector<TensorD> bias;

  static LayerGradients zeros_like(const NetworkSpec& net);
  void accumulate(const LayerGradients& other);
  void scale(double factor);
};

// Surrogate-gradient backward pass over a recorded forward simulation.
// `out_grad` is dL/du^T of the output layer. The output layer contributes
// sum_t outer(dL/du^T, o_in^t); hidden spiking layers replace the threshold
// derivative by surrogate_spike_grad and use the Euler gain dt*R/tau_m as
// du^t/dI^t, treating u^{t-1} as an input (no gradient through time).
LayerGradients stdb_backward(const BackpropTape& tape, const TensorD& out_grad,
                             const NetworkSpec& net,
                             const SurrogateParams& params);

// v' = momentum * v + grad + weight_decay * w;  w' = w - lr * v'.
std::pair<double, double> sgd_momentum_update(double w, double grad,
                                              double velocity,
                                              const OptimizerParams& params);
void sgd_momentum_step(Tensor& weights, const TensorD& grad,
                       TensorD& velocity, const OptimizerParams& params);

// -(1 - p_t)^gamma * ln(p_t).
double focal_loss(double p_true, double gamma);
// d focal_loss / d u for softmax probabilities p = softmax(u).
TensorD focal_loss_potential_grad(const Tensor& probabilities,
                                  std::size_t label, double gamma);

enum class LossKind { kCrossEntropy, kFocal };

struct StdbTrainingParams {
  SurrogateParams surrogate;
  OptimizerParams optimizer;
  EncoderParams encoder;
  std::size_t epochs = 50;
  LossKind loss = LossKind::kCrossEntropy;
  double focal_gamma = 2.0;
  // Stop once an epoch reaches this training accuracy.
  double target_accuracy = 1.0;
};

struct EpochStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

struct StdbTrainingReport {
  std::vector<EpochStats> epochs;
};

// Minibatch SGD on the surrogate gradient. Only backprop-tagged layers are
// updated; dropout masks are drawn once per minibatch and held fixed for
// every timestep of every sample in it.
StdbTrainingReport train_stdb(NetworkSpec& net, const std::vector<Tensor>& images,
                              const std::vector<std::size_t>& labels,
                              const StdbTrainingParams& params, Rng& rng);

struct ClassificationResult {
  std::vector<std::size_t> predictions;
  double accuracy = 0.0;
};

// Poisson-encodes each image and decodes the output potential by argmax.
ClassificationResult evaluate_classification(
    const NetworkSpec& net, const std::vector<Tensor>& images,
    const std::vector<std::size_t>& labels, const EncoderParams& encoder,
    Rng& rng);

}  // namespace fshnn
