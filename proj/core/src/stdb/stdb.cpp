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

#include "fshnn/stdb/stdb.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace fshnn {

void SurrogateParams::validate() const {
  if (!(alpha > 0.0)) throw ParameterError("surrogate alpha must be > 0");
  if (!(beta >= 0.0)) throw ParameterError("surrogate beta must be >= 0");
}

void OptimizerParams::validate() const {
  if (!(learning_rate > 0.0)) throw ParameterError("learning rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ParameterError("momentum must be in [0,1)");
  }
  if (!(weight_decay >= 0.0)) throw ParameterError("weight decay must be >= 0");
  if (batch_size == 0) throw ParameterError("batch size must be >= 1");
}

Tensor one_hot(std::size_t label, std::size_t classes) {
  if (label >= classes) {
    throw InputError("label " + std::to_string(label) + " out of range for " +
                     std::to_string(classes) + " classes");
  }
  Tensor y(Shape{classes});
  y[label] = 1.0f;
  return y;
}

TensorD output_potential_grad(const Tensor& probabilities,
                              const Tensor& one_hot) {
  require_same_shape(probabilities.shape(), one_hot.shape(),
                     "output_potential_grad");
  TensorD g(probabilities.shape());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = static_cast<double>(probabilities[i]) -
           static_cast<double>(one_hot[i]);
  }
  return g;
}

double surrogate_spike_grad(int t, int t_s, const SurrogateParams& params,
                            int window) {
  const int since = t_s == kNeverSpiked ? t : t - t_s;
  const int dt = std::clamp(since, 0, window);
  return params.alpha * std::exp(-params.beta * static_cast<double>(dt));
}

LayerGradients LayerGradients::zeros_like(const NetworkSpec& net) {
  LayerGradients g;
  g.weights.resize(net.layers.size());
  g.bias.resize(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    if (!l.has_weights() || l.tag != LearningTag::kBackprop) continue;
    g.weights[i] = TensorD(l.weights.shape());
    if (l.has_bias()) g.bias[i] = TensorD(l.bias.shape());
  }
  return g;
}

void LayerGradients::accumulate(const LayerGradients& other) {
  auto add = [](std::vector<TensorD>& into, const std::vector<TensorD>& from) {
    if (into.size() != from.size()) {
      throw StructuralError("gradient sets have different layer counts");
    }
    for (std::size_t i = 0; i < into.size(); ++i) {
      if (from[i].empty()) continue;
      if (into[i].empty()) {
        into[i] = from[i];
        continue;
      }
      require_same_shape(into[i].shape(), from[i].shape(), "gradient");
      for (std::size_t k = 0; k < into[i].size(); ++k) into[i][k] += from[i][k];
    }
  };
  add(weights, other.weights);
  add(bias, other.bias);
}

void LayerGradients::scale(double factor) {
  for (auto* set : {&weights, &bias}) {
    for (auto& t : *set) {
      for (auto& v : t.data()) v *= factor;
    }
  }
}

namespace {

TensorD linear_backward_input(const LayerSpec& layer, const TensorD& grad,
                              const Shape& input_shape) {
  if (layer.kind == LayerKind::kConv2d) {
    return conv2d_backward_input(grad, layer.weights, input_shape,
                                 layer.stride, layer.padding);
  }
  return fc_backward_input(grad, layer.weights, input_shape);
}

void accumulate_linear_grads(const LayerSpec& layer, const TensorD& grad,
                             const Tensor& input, TensorD& grad_w,
                             TensorD& grad_b) {
  if (layer.kind == LayerKind::kConv2d) {
    conv2d_accumulate_weight_grad(grad, input, layer.stride, layer.padding,
                                  grad_w);
  } else {
    fc_accumulate_weight_grad(grad, input, grad_w);
  }
  if (!grad_b.empty()) {
    const std::size_t per_unit = grad.size() / grad_b.size();
    for (std::size_t i = 0; i < grad.size(); ++i) grad_b[i / per_unit] += grad[i];
  }
}

}  // namespace

LayerGradients stdb_backward(const BackpropTape& tape, const TensorD& out_grad,
                             const NetworkSpec& net,
                             const SurrogateParams& params) {
  params.validate();
  const std::size_t n_layers = net.layers.size();
  if (tape.inputs.size() != n_layers) {
    throw StructuralError("tape covers " + std::to_string(tape.inputs.size()) +
                          " layers, network has " + std::to_string(n_layers));
  }
  const auto shapes = net.layer_output_shapes();
  require_same_shape(out_grad.shape(), shapes.back(), "stdb_backward out_grad");

  LayerGradients grads = LayerGradients::zeros_like(net);
  std::size_t lowest = n_layers;
  for (std::size_t i = 0; i < n_layers; ++i) {
    if (net.layers[i].has_weights() &&
        net.layers[i].tag == LearningTag::kBackprop) {
      lowest = i;
      break;
    }
  }
  if (lowest == n_layers) return grads;

  const int window = static_cast<int>(tape.steps);
  const std::size_t out_layer = n_layers - 1;
  for (std::size_t t = 0; t < tape.steps; ++t) {
    for (std::size_t l = 0; l < n_layers; ++l) {
      if (tape.inputs[l].size() != tape.steps) {
        throw StructuralError("tape layer " + std::to_string(l) +
                              " is missing timesteps");
      }
    }
    // u^T = sum_t (W o^t + b): every step sees the same dL/du^T.
    const auto& out_spec = net.layers[out_layer];
    const Tensor& out_input = tape.inputs[out_layer][t];
    if (!grads.weights[out_layer].empty()) {
      accumulate_linear_grads(out_spec, out_grad, out_input,
                              grads.weights[out_layer], grads.bias[out_layer]);
    }
    if (out_layer == lowest) continue;
    TensorD grad =
        linear_backward_input(out_spec, out_grad, out_input.shape());

    for (std::size_t l = out_layer; l-- > lowest;) {
      const auto& layer = net.layers[l];
      const Shape& in_shape = tape.inputs[l][t].shape();
      switch (layer.kind) {
        case LayerKind::kDropout: {
          const Tensor& mask = tape.masks.at(l);
          if (!mask.empty()) {
            for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= mask[i];
          }
          break;
        }
        case LayerKind::kSpikeMaxPool: {
          const auto& selected = tape.pool_selection.at(l).at(t);
          TensorD routed(in_shape);
          for (std::size_t i = 0; i < selected.size(); ++i) {
            routed[selected[i]] += grad[i];
          }
          grad = std::move(routed);
          break;
        }
        case LayerKind::kAvgPool:
        case LayerKind::kConv2d:
        case LayerKind::kFc: {
          if (layer.lif) {
            const auto& last = tape.last_spike.at(l).at(t);
            const double gain = layer.lif->input_gain();
            for (std::size_t i = 0; i < grad.size(); ++i) {
              grad[i] *= gain * surrogate_spike_grad(static_cast<int>(t),
                                                     last[i], params, window);
            }
          }
          if (layer.kind == LayerKind::kAvgPool) {
            grad = avgpool2d_backward(grad, in_shape, layer.window);
            break;
          }
          if (!grads.weights[l].empty()) {
            accumulate_linear_grads(layer, grad, tape.inputs[l][t],
                                    grads.weights[l], grads.bias[l]);
          }
          if (l > lowest) grad = linear_backward_input(layer, grad, in_shape);
          break;
        }
        case LayerKind::kMaxPool:
          throw StructuralError("maxpool layers have no spiking backward");
      }
    }
  }
  return grads;
}

std::pair<double, double> sgd_momentum_update(double w, double grad,
                                              double velocity,
                                              const OptimizerParams& params) {
  const double v =
      params.momentum * velocity + grad + params.weight_decay * w;
  return {w - params.learning_rate * v, v};
}

void sgd_momentum_step(Tensor& weights, const TensorD& grad, TensorD& velocity,
                       const OptimizerParams& params) {
  require_same_shape(weights.shape(), grad.shape(), "sgd_momentum_step");
  if (velocity.empty()) velocity = TensorD(weights.shape());
  require_same_shape(weights.shape(), velocity.shape(), "sgd velocity");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    auto [w, v] = sgd_momentum_update(weights[i], grad[i], velocity[i], params);
    weights[i] = static_cast<float>(w);
    velocity[i] = v;
  }
}

double focal_loss(double p_true, double gamma) {
  if (!(gamma >= 0.0)) throw ParameterError("focal gamma must be >= 0");
  if (!(p_true > 0.0)) {
    throw NumericError("focal loss is infinite at p_t = 0");
  }
  if (p_true > 1.0) throw InputError("p_t must be in (0,1]");
  return -std::pow(1.0 - p_true, gamma) * std::log(p_true);
}

TensorD focal_loss_potential_grad(const Tensor& probabilities,
                                  std::size_t label, double gamma) {
  if (label >= probabilities.size()) throw InputError("label out of range");
  const double pt = probabilities[label];
  if (!(pt > 0.0)) throw NumericError("focal gradient undefined at p_t = 0");
  const double one_minus = 1.0 - pt;
  // dFL/dp_t, then dp_t/du_i = p_t (delta_it - p_i).
  const double dfl_dpt =
      (gamma > 0.0 && one_minus > 0.0 ? gamma * std::pow(one_minus, gamma - 1.0) * std::log(pt)
                   : 0.0) -
      std::pow(one_minus, gamma) / pt;
  TensorD g(probabilities.shape());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double delta = i == label ? 1.0 : 0.0;
    g[i] = dfl_dpt * pt * (delta - probabilities[i]);
  }
  return g;
}

StdbTrainingReport train_stdb(NetworkSpec& net, const std::vector<Tensor>& images,
                              const std::vector<std::size_t>& labels,
                              const StdbTrainingParams& params, Rng& rng) {
  params.surrogate.validate();
  params.optimizer.validate();
  params.encoder.validate();
  net.validate_snn();
  if (images.empty()) throw InputError("STDB training needs samples");
  if (images.size() != labels.size()) {
    throw InputError("image and label counts differ");
  }
  const std::size_t classes = net.output_size();

  std::vector<TensorD> w_velocity(net.layers.size());
  std::vector<TensorD> b_velocity(net.layers.size());
  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  SimulationOptions options;
  options.record_tape = true;
  const bool has_dropout =
      std::any_of(net.layers.begin(), net.layers.end(), [](const LayerSpec& l) {
        return l.kind == LayerKind::kDropout && l.rate > 0.0;
      });

  StdbTrainingReport report;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size();
         start += params.optimizer.batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + params.optimizer.batch_size);
      const DropoutMasks masks =
          has_dropout ? draw_network_masks(net, rng) : DropoutMasks{};
      LayerGradients batch = LayerGradients::zeros_like(net);
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t idx = order[k];
        const SpikeTrain input =
            poisson_encode(images[idx], params.encoder, rng);
        const auto sim = forward_simulate(net, input, masks, options);
        const Tensor target = one_hot(labels[idx], classes);
        const auto ce = spike_cross_entropy_loss(sim.output_potential, target);
        if (argmax(sim.output_potential) == labels[idx]) ++correct;
        TensorD out_grad;
        if (params.loss == LossKind::kFocal) {
          const double pt = ce.probabilities[labels[idx]];
          loss_sum += focal_loss(std::max(pt, 1e-30), params.focal_gamma);
          out_grad = focal_loss_potential_grad(ce.probabilities, labels[idx],
                                               params.focal_gamma);
        } else {
          loss_sum += ce.loss;
          out_grad = output_potential_grad(ce.probabilities, target);
        }
        batch.accumulate(stdb_backward(*sim.tape, out_grad, net, params.surrogate));
      }
      batch.scale(1.0 / static_cast<double>(stop - start));
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (batch.weights[l].empty()) continue;
        sgd_momentum_step(net.layers[l].weights, batch.weights[l],
                          w_velocity[l], params.optimizer);
        if (!batch.bias[l].empty()) {
          sgd_momentum_step(net.layers[l].bias, batch.bias[l], b_velocity[l],
                            params.optimizer);
        }
      }
    }
    EpochStats stats;
    stats.loss = loss_sum / static_cast<double>(images.size());
    stats.accuracy =
        static_cast<double>(correct) / static_cast<double>(images.size());
    report.epochs.push_back(stats);
    if (stats.accuracy >= params.target_accuracy) break;
  }
  return report;
}

ClassificationResult evaluate_classification(
    const NetworkSpec& net, const std::vector<Tensor>& images,
    const std::vector<std::size_t>& labels, const EncoderParams& encoder,
    Rng& rng) {
  if (images.size() != labels.size()) {
    throw InputError("image and label counts differ");
  }
  ClassificationResult result;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto sim = forward_simulate(net, poisson_encode(images[i], encoder, rng));
    const std::size_t predicted = argmax(decode_potential(sim.output_potential));
    result.predictions.push_back(predicted);
    if (predicted == labels[i]) ++correct;
  }
  result.accuracy = images.empty() ? 0.0
                                   : static_cast<double>(correct) /
                                         static_cast<double>(images.size());
  return result;
}

}  // namespace fshnn
