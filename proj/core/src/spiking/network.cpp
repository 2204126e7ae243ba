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

#include "fshnn/spiking/network.hpp"

#include <cmath>
#include <string>

namespace fshnn {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kFc: return "fc";
    case LayerKind::kAvgPool: return "avgpool";
    case LayerKind::kSpikeMaxPool: return "spike_maxpool";
    case LayerKind::kMaxPool: return "maxpool";
    case LayerKind::kDropout: return "dropout";
  }
  return "?";
}

std::string_view to_string(LearningTag tag) {
  switch (tag) {
    case LearningTag::kStdp: return "stdp";
    case LearningTag::kBackprop: return "backprop";
    case LearningTag::kFrozen: return "frozen";
  }
  return "?";
}

std::string_view to_string(Activation act) {
  return act == Activation::kRelu ? "relu" : "none";
}

LayerKind parse_layer_kind(std::string_view name) {
  for (auto k : {LayerKind::kConv2d, LayerKind::kFc, LayerKind::kAvgPool,
                 LayerKind::kSpikeMaxPool, LayerKind::kMaxPool,
                 LayerKind::kDropout}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown layer kind '" + std::string(name) + "'");
}

LearningTag parse_learning_tag(std::string_view name) {
  for (auto t :
       {LearningTag::kStdp, LearningTag::kBackprop, LearningTag::kFrozen}) {
    if (to_string(t) == name) return t;
  }
  throw ParameterError("unknown learning tag '" + std::string(name) + "'");
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "none" || name == "linear") return Activation::kNone;
  throw ParameterError("unknown activation '" + std::string(name) + "'");
}

LayerSpec LayerSpec::conv2d(std::size_t out_channels, std::size_t kernel,
                            std::size_t stride, std::size_t padding) {
  LayerSpec l;
  l.kind = LayerKind::kConv2d;
  l.units = out_channels;
  l.kernel = kernel;
  l.stride = stride;
  l.padding = padding;
  return l;
}

LayerSpec LayerSpec::fc(std::size_t out_features) {
  LayerSpec l;
  l.kind = LayerKind::kFc;
  l.units = out_features;
  return l;
}

LayerSpec LayerSpec::avgpool(std::size_t window) {
  LayerSpec l;
  l.kind = LayerKind::kAvgPool;
  l.window = window;
  return l;
}

LayerSpec LayerSpec::spike_maxpool(std::size_t window) {
  LayerSpec l;
  l.kind = LayerKind::kSpikeMaxPool;
  l.window = window;
  return l;
}

LayerSpec LayerSpec::maxpool(std::size_t window) {
  LayerSpec l;
  l.kind = LayerKind::kMaxPool;
  l.window = window;
  return l;
}

LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec l;
  l.kind = LayerKind::kDropout;
  l.rate = rate;
  return l;
}

LayerSpec&& LayerSpec::with_lif(LifParams params) && {
  lif = params;
  return std::move(*this);
}

LayerSpec&& LayerSpec::with_tag(LearningTag t) && {
  tag = t;
  return std::move(*this);
}

LayerSpec&& LayerSpec::with_activation(Activation a) && {
  activation = a;
  return std::move(*this);
}

LayerSpec&& LayerSpec::with_bias(bool enabled) && {
  bias = enabled ? Tensor(Shape{1}) : Tensor();  // resized by allocate
  return std::move(*this);
}

std::vector<Shape> NetworkSpec::layer_output_shapes() const {
  if (input_shape.empty()) throw DimensionError("network has no input shape");
  std::vector<Shape> shapes;
  Shape current = input_shape;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const std::string where = "layer " + std::to_string(i) + " (" +
                              std::string(to_string(l.kind)) + "): ";
    switch (l.kind) {
      case LayerKind::kConv2d: {
        if (current.size() != 3) {
          throw DimensionError(where + "conv2d needs a [C,H,W] input, got " +
                               shape_string(current));
        }
        if (l.units == 0 || l.kernel == 0) {
          throw DimensionError(where + "conv2d needs units and kernel >= 1");
        }
        const auto oh = conv_extent(current[1], l);
        const auto ow = conv_extent(current[2], l);
        current = Shape{l.units, oh, ow};
        break;
      }
      case LayerKind::kFc:
        if (l.units == 0) throw DimensionError(where + "fc needs units >= 1");
        current = Shape{l.units};
        break;
      case LayerKind::kAvgPool:
      case LayerKind::kSpikeMaxPool:
      case LayerKind::kMaxPool:
        if (current.size() != 3 || l.window == 0 || current[1] % l.window ||
            current[2] % l.window) {
          throw DimensionError(where + "window " + std::to_string(l.window) +
                               " does not divide " + shape_string(current));
        }
        current = Shape{current[0], current[1] / l.window,
                        current[2] / l.window};
        break;
      case LayerKind::kDropout:
        break;
    }
    shapes.push_back(current);
  }
  return shapes;
}

std::size_t NetworkSpec::conv_extent(std::size_t in, const LayerSpec& l) {
  if (l.stride == 0) throw DimensionError("conv stride must be >= 1");
  if (l.kernel > in + 2 * l.padding) {
    throw DimensionError("conv kernel " + std::to_string(l.kernel) +
                         " larger than padded input " +
                         std::to_string(in + 2 * l.padding));
  }
  return (in + 2 * l.padding - l.kernel) / l.stride + 1;
}

Shape NetworkSpec::layer_input_shape(std::size_t layer) const {
  if (layer == 0) return input_shape;
  return layer_output_shapes().at(layer - 1);
}

Shape NetworkSpec::weight_shape(std::size_t layer) const {
  const auto& l = layers.at(layer);
  const Shape in = layer_input_shape(layer);
  switch (l.kind) {
    case LayerKind::kConv2d:
      return Shape{l.units, in.at(0), l.kernel, l.kernel};
    case LayerKind::kFc:
      return Shape{l.units, shape_size(in)};
    default:
      return {};
  }
}

void NetworkSpec::allocate_parameters() {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto& l = layers[i];
    if (!l.has_weights()) continue;
    const Shape ws = weight_shape(i);
    if (l.weights.shape() != ws) l.weights = Tensor(ws);
    if (l.has_bias() && l.bias.shape() != Shape{l.units}) {
      l.bias = Tensor(Shape{l.units});
    }
  }
}

void NetworkSpec::initialize_parameters(Rng& rng, double gain) {
  allocate_parameters();
  for (auto& l : layers) {
    if (!l.has_weights()) continue;
    const std::size_t fan_in = l.weights.size() / l.weights.dim(0);
    const double stddev = gain * std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& w : l.weights.data()) {
      w = static_cast<float>(rng.normal(0.0, stddev));
    }
    if (l.has_bias()) l.bias.fill(0.0f);
  }
}

void NetworkSpec::validate_snn() const {
  const auto shapes = layer_output_shapes();
  if (layers.empty()) throw DimensionError("network has no layers");
  const auto& last = layers.back();
  if (!last.has_weights() || last.is_spiking()) {
    throw DimensionError(
        "the final layer must be a non-spiking conv2d/fc potential "
        "accumulator");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.lif) l.lif->validate();
    if (l.kind == LayerKind::kMaxPool) {
      throw DimensionError("layer " + std::to_string(i) +
                           ": maxpool is ANN-only; use spike_maxpool");
    }
    if (l.kind == LayerKind::kDropout && !(l.rate >= 0.0 && l.rate < 1.0)) {
      throw ParameterError("dropout rate must be in [0,1)");
    }
    if (l.has_weights()) {
      if (i + 1 < layers.size() && !l.is_spiking()) {
        throw DimensionError("layer " + std::to_string(i) +
                             ": hidden weighted layers need LIF parameters "
                             "(only the final layer accumulates)");
      }
      if (l.weights.shape() != weight_shape(i)) {
        throw DimensionError("layer " + std::to_string(i) + ": weights " +
                             shape_string(l.weights.shape()) + " expected " +
                             shape_string(weight_shape(i)));
      }
      if (l.has_bias() && l.bias.size() != shapes[i].at(0) &&
          l.bias.size() != l.units) {
        throw DimensionError("layer " + std::to_string(i) + ": bias length");
      }
    }
  }
}

void NetworkSpec::validate_ann() const {
  layer_output_shapes();
  if (layers.empty()) throw DimensionError("network has no layers");
  const auto weighted = weighted_layers();
  if (weighted.empty() || weighted.back() != layers.size() - 1) {
    throw DimensionError("ANN must end in a weighted output layer");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.is_spiking()) {
      throw DimensionError("layer " + std::to_string(i) +
                           ": ANN layers carry no LIF parameters");
    }
    if (l.kind == LayerKind::kSpikeMaxPool) {
      throw DimensionError("layer " + std::to_string(i) +
                           ": spike_maxpool is SNN-only");
    }
    if (l.has_weights()) {
      const bool is_output = i + 1 == layers.size();
      if (is_output && l.activation != Activation::kNone) {
        throw DimensionError("ANN output layer must be linear");
      }
      if (!is_output && l.activation != Activation::kRelu) {
        throw DimensionError("layer " + std::to_string(i) +
                             ": hidden ANN layers must use ReLU");
      }
      if (l.weights.shape() != weight_shape(i)) {
        throw DimensionError("layer " + std::to_string(i) +
                             ": weight shape mismatch");
      }
    }
  }
}

std::size_t NetworkSpec::output_size() const {
  return shape_size(layer_output_shapes().back());
}

std::size_t NetworkSpec::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<std::size_t> NetworkSpec::weighted_layers() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].has_weights()) out.push_back(i);
  }
  return out;
}

}  // namespace fshnn
