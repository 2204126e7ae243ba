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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fshnn/numerics/rng.hpp"
#include "fshnn/numerics/tensor.hpp"
#include "fshnn/spiking/lif.hpp"

namespace fshnn {

enum class LayerKind {
  kConv2d,
  kFc,
  kAvgPool,
  kSpikeMaxPool,
  kMaxPool,  // ANN reference path only; rewritten to kSpikeMaxPool on conversion
  kDropout,
};

enum class LearningTag { kStdp, kBackprop, kFrozen };

enum class Activation { kNone, kRelu };

std::string_view to_string(LayerKind kind);
std::string_view to_string(LearningTag tag);
std::string_view to_string(Activation act);
LayerKind parse_layer_kind(std::string_view name);
LearningTag parse_learning_tag(std::string_view name);
Activation parse_activation(std::string_view name);

struct LayerSpec {
  LayerKind kind = LayerKind::kFc;

  // conv2d: output channels; fc: output features.
  std::size_t units = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t padding = 0;
  // Pooling window (avgpool, spike_maxpool, maxpool).
  std::size_t window = 0;
  // Dropout probability of zeroing a unit.
  double rate = 0.0;

  // Spiking layers carry LIF parameters; the output layer and ANN layers
  // do not.
  std::optional<LifParams> lif;
  // ANN reference path activation.
  Activation activation = Activation::kNone;
  LearningTag tag = LearningTag::kFrozen;
  // Cross-depth lateral inhibition, active while a layer trains with STDP.
  bool inhibition = false;

  Tensor weights;
  Tensor bias;  // empty when the layer has no bias

  bool has_weights() const {
    return kind == LayerKind::kConv2d || kind == LayerKind::kFc;
  }
  bool has_bias() const { return !bias.empty(); }
  bool is_spiking() const { return lif.has_value(); }

  static LayerSpec conv2d(std::size_t out_channels, std::size_t kernel,
                          std::size_t stride = 1, std::size_t padding = 0);
  static LayerSpec fc(std::size_t out_features);
  static LayerSpec avgpool(std::size_t window);
  static LayerSpec spike_maxpool(std::size_t window);
  static LayerSpec maxpool(std::size_t window);
  static LayerSpec dropout(double rate);

  LayerSpec&& with_lif(LifParams params) &&;
  LayerSpec&& with_tag(LearningTag t) &&;
  LayerSpec&& with_activation(Activation a) &&;
  LayerSpec&& with_bias(bool enabled = true) &&;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Declarative architecture shared by the ANN reference path, the SNN
// simulator and the converter. Layer weights live inside the spec so that a
// spec plus its tensors is a complete checkpoint.
struct NetworkSpec {
  Shape input_shape;
  std::vector<LayerSpec> layers;

  // Output shape of every layer, resolving conv/pool arithmetic. Throws
  // DimensionError on incompatible wiring.
  std::vector<Shape> layer_output_shapes() const;
  Shape layer_input_shape(std::size_t layer) const;
  Shape weight_shape(std::size_t layer) const;

  // Allocates weights/bias tensors of the right shape (zeros) where missing
  // or mis-shaped.
  void allocate_parameters();
  // He-style initialization: N(0, gain^2 * 2 / fan_in) per weight.
  void initialize_parameters(Rng& rng, double gain = 1.0);

  // SNN invariants: wiring resolves, the final layer is the only weighted
  // layer without LIF parameters (a non-spiking potential accumulator), and
  // every weight tensor has the resolved shape.
  void validate_snn() const;
  // ANN invariants: no LIF parameters anywhere, ReLU on every hidden
  // weighted layer, linear output.
  void validate_ann() const;

  std::size_t output_size() const;
  std::size_t parameter_count() const;
  std::vector<std::size_t> weighted_layers() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;

 private:
  static std::size_t conv_extent(std::size_t in, const LayerSpec& l);
};

}  // namespace fshnn
