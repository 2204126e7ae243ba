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

#include "fshnn/conversion/conversion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fshnn/numerics/kernels.hpp"

namespace fshnn {

namespace {

Tensor linear_forward(const LayerSpec& layer, const Tensor& input) {
  Tensor out = layer.kind == LayerKind::kConv2d
                   ? conv2d_forward(input, layer.weights, layer.stride,
                                    layer.padding)
                   : fc_forward(input, layer.weights);
  if (layer.has_bias()) {
    const std::size_t per_unit = out.size() / layer.bias.size();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += layer.bias[i / per_unit];
  }
  return out;
}

std::size_t channels_of(const Shape& shape) {
  return shape.size() == 3 ? shape[0] : shape_size(shape);
}

std::size_t channel_of_index(const Shape& shape, std::size_t flat) {
  return shape.size() == 3 ? flat / (shape[1] * shape[2]) : flat;
}

}  // namespace

AnnForwardResult ann_forward(const AnnCheckpoint& ann, const Tensor& input) {
  ann.validate_ann();
  require_same_shape(input.shape(), ann.input_shape, "ann_forward input");
  AnnForwardResult result;
  Tensor activity = input;
  for (const auto& layer : ann.layers) {
    Tensor pre;
    switch (layer.kind) {
      case LayerKind::kConv2d:
      case LayerKind::kFc:
        pre = linear_forward(layer, activity);
        break;
      case LayerKind::kAvgPool:
        pre = avgpool2d(activity, layer.window);
        break;
      case LayerKind::kMaxPool:
        pre = maxpool2d(activity, layer.window);
        break;
      case LayerKind::kDropout:
        pre = activity;
        break;
      case LayerKind::kSpikeMaxPool:
        throw ConversionError("spike_maxpool has no ANN semantics");
    }
    Tensor act = pre;
    if (layer.activation == Activation::kRelu) {
      for (auto& v : act.data()) v = std::max(v, 0.0f);
    }
    result.pre_activations.push_back(std::move(pre));
    result.activations.push_back(act);
    activity = std::move(act);
  }
  result.output = activity;
  return result;
}

std::size_t ann_predict(const AnnCheckpoint& ann, const Tensor& input) {
  const Tensor out = ann_forward(ann, input).output;
  return static_cast<std::size_t>(
      std::max_element(out.data().begin(), out.data().end()) -
      out.data().begin());
}

CalibrationStats collect_calibration_stats(const AnnCheckpoint& ann,
                                           const std::vector<Tensor>& data) {
  if (data.empty()) throw InputError("calibration set is empty");
  const auto shapes = ann.layer_output_shapes();
  CalibrationStats stats;
  stats.layer_max.assign(ann.layers.size(), 0.0);
  stats.channel_max.resize(ann.layers.size());
  for (std::size_t l = 0; l < ann.layers.size(); ++l) {
    stats.channel_max[l].assign(channels_of(shapes[l]), 0.0);
  }
  for (const auto& sample : data) {
    const auto fwd = ann_forward(ann, sample);
    for (std::size_t l = 0; l < ann.layers.size(); ++l) {
      for (std::size_t i = 0; i < fwd.activations[l].size(); ++i) {
        const double pre = fwd.pre_activations[l][i];
        const double act = fwd.activations[l][i];
        stats.layer_max[l] = std::max(stats.layer_max[l], pre);
        auto& cm = stats.channel_max[l][channel_of_index(shapes[l], i)];
        cm = std::max(cm, act);
      }
    }
  }
  return stats;
}

std::vector<LayerThreshold> balance_thresholds(const AnnCheckpoint& ann,
                                               const std::vector<Tensor>& data) {
  const auto stats = collect_calibration_stats(ann, data);
  std::vector<LayerThreshold> thresholds;
  for (std::size_t l = 0; l < ann.layers.size(); ++l) {
    const auto& layer = ann.layers[l];
    if (!layer.has_weights() || layer.activation != Activation::kRelu) continue;
    if (!(stats.layer_max[l] > 0.0)) {
      throw InputError("layer " + std::to_string(l) +
                       " never produced a positive pre-activation on the "
                       "calibration set; its threshold would be 0");
    }
    thresholds.push_back({l, stats.layer_max[l]});
  }
  return thresholds;
}

namespace {

// Rescales one weighted layer: w[o, j] *= in_scale[channel(j)] / out_div[o].
void rescale_layer(LayerSpec& layer, const Shape& in_shape,
                   const std::vector<double>& in_scale,
                   const std::vector<double>& out_div) {
  Tensor& w = layer.weights;
  const std::size_t outs = w.dim(0);
  const std::size_t per_out = w.size() / outs;
  for (std::size_t o = 0; o < outs; ++o) {
    for (std::size_t k = 0; k < per_out; ++k) {
      std::size_t in_channel = 0;
      if (layer.kind == LayerKind::kConv2d) {
        in_channel = k / (layer.kernel * layer.kernel);
      } else {
        in_channel = channel_of_index(in_shape, k);
      }
      w[o * per_out + k] = static_cast<float>(
          w[o * per_out + k] * in_scale[in_channel] / out_div[o]);
    }
    if (layer.has_bias()) {
      layer.bias[o] = static_cast<float>(layer.bias[o] / out_div[o]);
    }
  }
}

struct ScaledNetwork {
  NetworkSpec net;
  std::vector<double> thresholds;  // per layer, for hidden weighted layers
};

ScaledNetwork scale_network(const AnnCheckpoint& ann,
                            const CalibrationStats& stats,
                            NormalizationMode mode) {
  ann.validate_ann();
  const auto shapes = ann.layer_output_shapes();
  if (stats.layer_max.size() != ann.layers.size() ||
      stats.channel_max.size() != ann.layers.size()) {
    throw StructuralError("calibration stats do not match the network");
  }
  ScaledNetwork out{ann, std::vector<double>(ann.layers.size(), 0.0)};
  std::vector<double> in_scale(channels_of(ann.input_shape), 1.0);
  for (std::size_t l = 0; l < ann.layers.size(); ++l) {
    auto& layer = out.net.layers[l];
    const Shape in_shape = ann.layer_input_shape(l);
    const std::size_t out_channels = channels_of(shapes[l]);
    if (stats.channel_max[l].size() != out_channels) {
      throw StructuralError("calibration channel count mismatch at layer " +
                            std::to_string(l));
    }
    std::vector<double> out_scale;
    if (layer.has_weights()) {
      const bool is_output = l + 1 == ann.layers.size();
      std::vector<double> out_div(layer.weights.dim(0), 1.0);
      if (is_output) {
        out_scale.assign(out_channels, 1.0);
      } else if (mode == NormalizationMode::kChannel) {
        out_scale.resize(out_channels);
        for (std::size_t c = 0; c < out_channels; ++c) {
          out_scale[c] = std::max(stats.channel_max[l][c], kChannelEpsilon);
        }
        out_div = out_scale;
        out.thresholds[l] = 1.0;
      } else {
        const double lambda = stats.layer_max[l];
        if (!(lambda > 0.0)) {
          throw InputError("layer " + std::to_string(l) +
                           " has a degenerate (zero) balanced threshold");
        }
        out_scale.assign(out_channels, lambda);
        out.thresholds[l] = lambda;
      }
      rescale_layer(layer, in_shape, in_scale, out_div);
    } else {
      // Pooling and dropout keep the channel layout and its scale.
      out_scale = in_scale;
      if (out_scale.size() != out_channels) {
        throw StructuralError("channel layout changed across layer " +
                              std::to_string(l));
      }
    }
    in_scale = std::move(out_scale);
  }
  return out;
}

}  // namespace

AnnCheckpoint channel_normalize(const AnnCheckpoint& ann,
                                const CalibrationStats& stats) {
  return scale_network(ann, stats, NormalizationMode::kChannel).net;
}

NetworkSpec convert_ann_to_snn(const AnnCheckpoint& ann,
                               const CalibrationStats& stats,
                               NormalizationMode mode) {
  for (std::size_t l = 0; l < ann.layers.size(); ++l) {
    const auto& layer = ann.layers[l];
    if (layer.kind == LayerKind::kSpikeMaxPool || layer.is_spiking()) {
      throw ConversionError("layer " + std::to_string(l) + " (" +
                            std::string(to_string(layer.kind)) +
                            ") is not an ANN layer and cannot be converted");
    }
  }
  auto scaled = scale_network(ann, stats, mode);
  NetworkSpec snn = std::move(scaled.net);
  for (std::size_t l = 0; l < snn.layers.size(); ++l) {
    auto& layer = snn.layers[l];
    const bool is_output = l + 1 == snn.layers.size();
    if (layer.kind == LayerKind::kMaxPool) {
      layer.kind = LayerKind::kSpikeMaxPool;
    }
    if (layer.has_weights()) {
      layer.tag = LearningTag::kBackprop;
      if (!is_output) {
        layer.lif = LifParams::integrate_and_fire(scaled.thresholds[l]);
      }
    }
    layer.activation = Activation::kNone;
  }
  snn.validate_snn();
  return snn;
}

namespace {

struct AnnGrads {
  std::vector<TensorD> weights;
  std::vector<TensorD> bias;
};

TensorD maxpool_backward(const TensorD& grad_out, const Tensor& input,
                         std::size_t window) {
  TensorD grad_in(input.shape());
  const std::size_t c = input.dim(0), oh = input.dim(1) / window,
                    ow = input.dim(2) / window;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t by = y * window, bx = x * window;
        for (std::size_t dy = 0; dy < window; ++dy) {
          for (std::size_t dx = 0; dx < window; ++dx) {
            if (input.at(ch, y * window + dy, x * window + dx) >
                input.at(ch, by, bx)) {
              by = y * window + dy;
              bx = x * window + dx;
            }
          }
        }
        grad_in.at(ch, by, bx) += grad_out.at(ch, y, x);
      }
    }
  }
  return grad_in;
}

void ann_backward(const AnnCheckpoint& ann, const Tensor& input,
                  const AnnForwardResult& fwd, TensorD grad, AnnGrads& grads) {
  for (std::size_t l = ann.layers.size(); l-- > 0;) {
    const auto& layer = ann.layers[l];
    const Tensor& layer_in = l == 0 ? input : fwd.activations[l - 1];
    if (layer.activation == Activation::kRelu) {
      for (std::size_t i = 0; i < grad.size(); ++i) {
        if (fwd.pre_activations[l][i] <= 0.0f) grad[i] = 0.0;
      }
    }
    switch (layer.kind) {
      case LayerKind::kFc:
      case LayerKind::kConv2d: {
        if (layer.kind == LayerKind::kFc) {
          fc_accumulate_weight_grad(grad, layer_in, grads.weights[l]);
        } else {
          conv2d_accumulate_weight_grad(grad, layer_in, layer.stride,
                                        layer.padding, grads.weights[l]);
        }
        if (layer.has_bias()) {
          const std::size_t per_unit = grad.size() / layer.bias.size();
          for (std::size_t i = 0; i < grad.size(); ++i) {
            grads.bias[l][i / per_unit] += grad[i];
          }
        }
        if (l == 0) return;
        grad = layer.kind == LayerKind::kFc
                   ? fc_backward_input(grad, layer.weights, layer_in.shape())
                   : conv2d_backward_input(grad, layer.weights,
                                           layer_in.shape(), layer.stride,
                                           layer.padding);
        break;
      }
      case LayerKind::kAvgPool:
        grad = avgpool2d_backward(grad, layer_in.shape(), layer.window);
        break;
      case LayerKind::kMaxPool:
        grad = maxpool_backward(grad, layer_in, layer.window);
        break;
      case LayerKind::kDropout:
        break;
      case LayerKind::kSpikeMaxPool:
        throw ConversionError("spike_maxpool has no ANN semantics");
    }
  }
}

}  // namespace

double train_ann_classifier(AnnCheckpoint& ann, const std::vector<Tensor>& images,
                            const std::vector<std::size_t>& labels,
                            const AnnTrainingParams& params, Rng& rng) {
  ann.validate_ann();
  if (images.empty() || images.size() != labels.size()) {
    throw InputError("ANN training needs matching, non-empty images/labels");
  }
  const std::size_t n_layers = ann.layers.size();
  AnnGrads velocity;
  velocity.weights.resize(n_layers);
  velocity.bias.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (!ann.layers[l].has_weights()) continue;
    velocity.weights[l] = TensorD(ann.layers[l].weights.shape());
    if (ann.layers[l].has_bias()) {
      velocity.bias[l] = TensorD(ann.layers[l].bias.shape());
    }
  }
  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double accuracy = 0.0;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
      const std::size_t stop = std::min(order.size(), start + params.batch_size);
      AnnGrads grads;
      grads.weights.resize(n_layers);
      grads.bias.resize(n_layers);
      for (std::size_t l = 0; l < n_layers; ++l) {
        if (velocity.weights[l].empty()) continue;
        grads.weights[l] = TensorD(velocity.weights[l].shape());
        if (!velocity.bias[l].empty()) {
          grads.bias[l] = TensorD(velocity.bias[l].shape());
        }
      }
      for (std::size_t k = start; k < stop; ++k) {
        const auto& x = images[order[k]];
        const auto fwd = ann_forward(ann, x);
        const Tensor p = softmax(fwd.output);
        TensorD grad(p.shape());
        for (std::size_t i = 0; i < p.size(); ++i) {
          grad[i] = p[i] - (i == labels[order[k]] ? 1.0 : 0.0);
        }
        ann_backward(ann, x, fwd, std::move(grad), grads);
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t l = 0; l < n_layers; ++l) {
        auto update = [&](Tensor& w, const TensorD& g, TensorD& v) {
          for (std::size_t i = 0; i < w.size(); ++i) {
            v[i] = params.momentum * v[i] + g[i] * inv;
            w[i] = static_cast<float>(w[i] - params.learning_rate * v[i]);
          }
        };
        if (!grads.weights[l].empty()) {
          update(ann.layers[l].weights, grads.weights[l], velocity.weights[l]);
        }
        if (!grads.bias[l].empty()) {
          update(ann.layers[l].bias, grads.bias[l], velocity.bias[l]);
        }
      }
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (ann_predict(ann, images[i]) == labels[i]) ++correct;
    }
    accuracy = static_cast<double>(correct) / static_cast<double>(images.size());
    if (params.stop_at_perfect && correct == images.size()) break;
  }
  return accuracy;
}

}  // namespace fshnn
