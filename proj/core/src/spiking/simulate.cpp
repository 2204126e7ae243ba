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

#include "fshnn/spiking/simulate.hpp"

#include <string>
#include <utility>

#include "fshnn/numerics/kernels.hpp"
#include "fshnn/stdp/stdp.hpp"

namespace fshnn {

Tensor accumulate_output_potential(const Tensor& u_prev, const Tensor& weights,
                                   const Tensor& spikes) {
  if (weights.rank() != 2 || weights.dim(0) != u_prev.size() ||
      weights.dim(1) != spikes.size()) {
    throw DimensionError("accumulate_output_potential: weights " +
                         shape_string(weights.shape()) + ", u " +
                         shape_string(u_prev.shape()) + ", spikes " +
                         shape_string(spikes.shape()));
  }
  Tensor u = fc_forward(spikes, weights);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += u_prev[i];
  return u.reshaped(u_prev.shape());
}

MaxPoolResult spike_maxpool(const Tensor& frame, Tensor& accumulators,
                            std::size_t window) {
  if (frame.rank() != 3 || window == 0 || frame.dim(1) % window ||
      frame.dim(2) % window) {
    throw DimensionError("spike_maxpool window " + std::to_string(window) +
                         " does not divide " + shape_string(frame.shape()));
  }
  require_same_shape(frame.shape(), accumulators.shape(), "spike_maxpool");
  for (std::size_t i = 0; i < frame.size(); ++i) {
    accumulators[i] += frame[i] != 0.0f ? 1.0f : 0.0f;
  }
  const std::size_t c = frame.dim(0), h = frame.dim(1), w = frame.dim(2);
  const std::size_t oh = h / window, ow = w / window;
  MaxPoolResult result{Tensor(Shape{c, oh, ow}), {}};
  result.selected.resize(c * oh * ow);
  std::size_t out = 0;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x, ++out) {
        // Row-major scan visits flat indices in increasing order, so a strict
        // comparison keeps the lowest index among ties.
        std::size_t best = (ch * h + y * window) * w + x * window;
        for (std::size_t dy = 0; dy < window; ++dy) {
          for (std::size_t dx = 0; dx < window; ++dx) {
            const std::size_t idx =
                (ch * h + y * window + dy) * w + x * window + dx;
            if (accumulators[idx] > accumulators[best]) best = idx;
          }
        }
        result.selected[out] = best;
        result.pooled[out] = frame[best];
      }
    }
  }
  return result;
}

Tensor apply_dropout_mask(const Tensor& activity, const Tensor& mask) {
  require_same_shape(activity.shape(), mask.shape(), "apply_dropout_mask");
  Tensor out(activity.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = activity[i] * mask[i];
  return out;
}

Tensor draw_dropout_mask(const Shape& shape, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ParameterError("dropout rate must be in [0,1), got " +
                         std::to_string(rate));
  }
  Tensor mask(shape, 1.0f);
  if (rate == 0.0) return mask;
  for (auto& m : mask.data()) m = rng.bernoulli(rate) ? 0.0f : 1.0f;
  return mask;
}

DropoutMasks draw_network_masks(const NetworkSpec& net, Rng& rng,
                                std::optional<double> rate_override) {
  const auto shapes = net.layer_output_shapes();
  DropoutMasks masks(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (net.layers[i].kind != LayerKind::kDropout) continue;
    masks[i] = draw_dropout_mask(shapes[i],
                                 rate_override.value_or(net.layers[i].rate), rng);
  }
  return masks;
}

namespace {

Tensor linear_current(const LayerSpec& layer, const Tensor& input) {
  Tensor current = layer.kind == LayerKind::kConv2d
                       ? conv2d_forward(input, layer.weights, layer.stride,
                                        layer.padding)
                       : fc_forward(input, layer.weights);
  if (layer.has_bias()) {
    // Biases enter as a constant per-step current, broadcast over space.
    const std::size_t per_unit = current.size() / layer.bias.size();
    for (std::size_t i = 0; i < current.size(); ++i) {
      current[i] += layer.bias[i / per_unit];
    }
  }
  return current;
}

}  // namespace

SimulationResult forward_simulate(const NetworkSpec& net,
                                  const SpikeTrain& input,
                                  const DropoutMasks& masks,
                                  const SimulationOptions& options) {
  net.validate_snn();
  if (input.frame_shape() != net.input_shape) {
    throw DimensionError("input frames " + shape_string(input.frame_shape()) +
                         " do not match network input " +
                         shape_string(net.input_shape));
  }
  if (!masks.empty() && masks.size() != net.layers.size()) {
    throw DimensionError("expected one dropout mask slot per layer");
  }
  const auto shapes = net.layer_output_shapes();
  const std::size_t steps = input.steps();
  const std::size_t n_layers =
      options.stop_after_layer
          ? std::min(*options.stop_after_layer + 1, net.layers.size())
          : net.layers.size();

  SimulationResult result;
  result.layer_records.reserve(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    result.layer_records.emplace_back(shapes[l], steps);
  }
  result.final_states.resize(n_layers);
  std::vector<Tensor> pool_accumulators(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& layer = net.layers[l];
    if (layer.lif) {
      result.final_states[l] = LifState::resting(shapes[l], *layer.lif);
    }
    if (layer.kind == LayerKind::kSpikeMaxPool) {
      pool_accumulators[l] = Tensor(net.layer_input_shape(l));
    }
    if (layer.kind == LayerKind::kDropout && !masks.empty() &&
        !masks[l].empty()) {
      require_same_shape(masks[l].shape(), shapes[l], "dropout mask");
    }
  }

  const bool is_full = n_layers == net.layers.size();
  Tensor potential;
  if (is_full) potential = Tensor(shapes.back());

  if (options.record_tape) {
    BackpropTape tape;
    tape.steps = steps;
    tape.inputs.assign(n_layers, {});
    tape.last_spike.assign(n_layers, {});
    tape.membrane.assign(n_layers, {});
    tape.pool_selection.assign(n_layers, {});
    tape.masks = masks.empty() ? DropoutMasks(net.layers.size()) : masks;
    result.tape = std::move(tape);
  }

  for (std::size_t t = 0; t < steps; ++t) {
    Tensor activity = input.frame(t);
    for (std::size_t l = 0; l < n_layers; ++l) {
      const auto& layer = net.layers[l];
      if (result.tape) result.tape->inputs[l].push_back(activity);
      Tensor out;
      switch (layer.kind) {
        case LayerKind::kConv2d:
        case LayerKind::kFc:
        case LayerKind::kAvgPool: {
          Tensor current = layer.kind == LayerKind::kAvgPool
                               ? avgpool2d(activity, layer.window)
                               : linear_current(layer, activity);
          if (!layer.lif) {
            if (l + 1 == net.layers.size()) {
              // Output accumulator: u^t = u^{t-1} + W o^t (+ b).
              for (std::size_t i = 0; i < potential.size(); ++i) {
                potential[i] += current[i];
              }
            }
            out = std::move(current);
            break;
          }
          auto& state = result.final_states[l];
          if (layer.inhibition) {
            lif_integrate(state, current, *layer.lif);
            Tensor crossed = lif_threshold(state, *layer.lif);
            Tensor winners = apply_cross_depth_inhibition(crossed, state.v);
            lif_fire(state, crossed, winners, *layer.lif);
            out = std::move(winners);
          } else {
            out = lif_step(state, current, *layer.lif);
          }
          if (result.tape) {
            result.tape->last_spike[l].push_back(state.last_spike);
            result.tape->membrane[l].push_back(state.v);
          }
          break;
        }
        case LayerKind::kSpikeMaxPool: {
          auto pooled =
              spike_maxpool(activity, pool_accumulators[l], layer.window);
          if (result.tape) {
            result.tape->pool_selection[l].push_back(std::move(pooled.selected));
          }
          out = std::move(pooled.pooled);
          break;
        }
        case LayerKind::kDropout:
          out = (!masks.empty() && !masks[l].empty())
                    ? apply_dropout_mask(activity, masks[l])
                    : activity;
          break;
        case LayerKind::kMaxPool:
          throw DimensionError("maxpool layers cannot be simulated");
      }
      result.layer_records[l].set_frame(t, out);
      activity = std::move(out);
    }
  }
  result.output_potential = std::move(potential);
  return result;
}

SimulationResult forward_simulate(const NetworkSpec& net,
                                  const SpikeTrain& input, std::size_t steps,
                                  const DropoutMasks& masks,
                                  const SimulationOptions& options) {
  if (input.steps() != steps) {
    throw DimensionError("input train spans " + std::to_string(input.steps()) +
                         " steps, expected " + std::to_string(steps));
  }
  return forward_simulate(net, input, masks, options);
}

}  // namespace fshnn
