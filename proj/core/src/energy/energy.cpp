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

#include "fshnn/energy/energy.hpp"

#include <algorithm>
#include <string>

#include "fshnn/error.hpp"

namespace fshnn {

namespace {

constexpr double kPicojoule = 1e-12;

NetworkSpec with_input(const NetworkSpec& spec, const Shape& input_shape) {
  NetworkSpec copy = spec;
  copy.input_shape = input_shape;
  return copy;
}

// Number of outputs each flat input position feeds, for one weighted layer.
std::vector<std::uint64_t> fan_out(const LayerSpec& layer, const Shape& in_shape,
                                   const Shape& out_shape) {
  std::vector<std::uint64_t> fan(shape_size(in_shape), 0);
  if (layer.kind == LayerKind::kFc) {
    std::fill(fan.begin(), fan.end(), static_cast<std::uint64_t>(layer.units));
    return fan;
  }
  const std::size_t cin = in_shape[0], h = in_shape[1], w = in_shape[2];
  const std::size_t cout = out_shape[0], oh = out_shape[1], ow = out_shape[2];
  const auto k = static_cast<long long>(layer.kernel);
  const auto pad = static_cast<long long>(layer.padding);
  const auto stride = static_cast<long long>(layer.stride);
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      for (long long ky = 0; ky < k; ++ky) {
        for (long long kx = 0; kx < k; ++kx) {
          const long long iy = static_cast<long long>(oy) * stride + ky - pad;
          const long long ix = static_cast<long long>(ox) * stride + kx - pad;
          if (iy < 0 || ix < 0 || iy >= static_cast<long long>(h) ||
              ix >= static_cast<long long>(w)) {
            continue;
          }
          for (std::size_t c = 0; c < cin; ++c) {
            fan[(c * h + static_cast<std::size_t>(iy)) * w +
                static_cast<std::size_t>(ix)] += cout;
          }
        }
      }
    }
  }
  return fan;
}

}  // namespace

void EnergyConstants::validate() const {
  if (!(e_mac_pj > 0.0 && e_ac_pj > 0.0)) {
    throw ParameterError("energy constants must be positive");
  }
}

OpCount count_mac_flops(const NetworkSpec& spec, const Shape& input_shape) {
  const NetworkSpec net = with_input(spec, input_shape);
  const auto shapes = net.layer_output_shapes();
  OpCount count;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    std::uint64_t ops = 0;
    const Shape in = net.layer_input_shape(l);
    if (layer.kind == LayerKind::kFc) {
      ops = static_cast<std::uint64_t>(shape_size(in)) * layer.units;
    } else if (layer.kind == LayerKind::kConv2d) {
      ops = static_cast<std::uint64_t>(shape_size(shapes[l])) * in[0] *
            layer.kernel * layer.kernel;
    }
    count.per_layer.push_back(ops);
    count.total += ops;
  }
  return count;
}

OpCount count_ac_flops(const NetworkSpec& spec, const Shape& input_shape) {
  return count_mac_flops(spec, input_shape);
}

OpCount count_ac_flops(const NetworkSpec& spec, const SpikeTrain& input,
                       const std::vector<SpikeTrain>& layer_records) {
  const NetworkSpec net = with_input(spec, input.frame_shape());
  const auto shapes = net.layer_output_shapes();
  if (layer_records.size() + 1 < net.layers.size()) {
    throw StructuralError("spike record covers " +
                          std::to_string(layer_records.size()) +
                          " layers, network has " +
                          std::to_string(net.layers.size()));
  }
  OpCount count;
  count.measured = true;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    std::uint64_t ops = 0;
    if (layer.has_weights()) {
      const SpikeTrain& pre = l == 0 ? input : layer_records[l - 1];
      const Shape in = net.layer_input_shape(l);
      if (pre.frame_shape() != in || pre.steps() != input.steps()) {
        throw StructuralError("spike record of layer " + std::to_string(l) +
                              " does not match the network");
      }
      const auto fan = fan_out(layer, in, shapes[l]);
      for (std::size_t t = 0; t < pre.steps(); ++t) {
        const Tensor& frame = pre.frame(t);
        for (std::size_t i = 0; i < frame.size(); ++i) {
          if (frame[i] != 0.0f) ops += fan[i];
        }
      }
    }
    count.per_layer.push_back(ops);
    count.total += ops;
  }
  return count;
}

double inference_energy(const OpCount& count, const EnergyConstants& constants,
                        EnergyMode mode, std::size_t timesteps) {
  constants.validate();
  const auto ops = static_cast<double>(count.total);
  if (mode == EnergyMode::kAnn) return ops * constants.e_mac_pj * kPicojoule;
  if (timesteps < 1) throw ParameterError("snn energy needs T >= 1");
  const double t = count.measured ? 1.0 : static_cast<double>(timesteps);
  return ops * constants.e_ac_pj * t * kPicojoule;
}

double efficiency_ratio(double e_ann, double e_snn) {
  if (!(e_snn > 0.0)) throw ParameterError("snn energy must be positive");
  return e_ann / e_snn;
}

}  // namespace fshnn
