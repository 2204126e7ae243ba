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
#include <vector>

#include "fshnn/numerics/tensor.hpp"
#include "fshnn/spiking/lif.hpp"
#include "fshnn/spiking/network.hpp"
#include "fshnn/spiking/spike_train.hpp"

namespace fshnn {

// u_prev + W o. Output neurons integrate without leak and never spike.
Tensor accumulate_output_potential(const Tensor& u_prev, const Tensor& weights,
                                   const Tensor& spikes);

struct MaxPoolResult {
  Tensor pooled;
  // Flat input index forwarded for every pooled unit.
  std::vector<std::size_t> selected;
};

// Max-pool by accumulated spike count: `accumulators` gains the current
// frame first, then every window forwards the current activity of its unit
// with the largest running count (ties to the lowest flat index).
MaxPoolResult spike_maxpool(const Tensor& frame, Tensor& accumulators,
                            std::size_t window);

// Elementwise product with a {0,1} mask; no 1/(1-rate) rescaling.
Tensor apply_dropout_mask(const Tensor& activity, const Tensor& mask);

// Draws a keep-mask (1 = keep) of the given shape with drop probability
// `rate`.
Tensor draw_dropout_mask(const Shape& shape, double rate, Rng& rng);

// Per-layer masks for one forward pass; an entry is used only for dropout
// layers and may be empty (identity).
using DropoutMasks = std::vector<Tensor>;

// Draws fresh masks for every dropout layer; `rate_override` replaces the
// per-layer rates when set.
DropoutMasks draw_network_masks(const NetworkSpec& net, Rng& rng,
                                std::optional<double> rate_override = {});

// Everything the surrogate-gradient backward pass needs, per layer and
// timestep. `inputs[l][t]` is the activity entering layer l at step t,
// `last_spike[l][t]` the spike-time bookkeeping of spiking layer l after
// step t, `pool_selection[l][t]` the spike_maxpool routing.
struct BackpropTape {
  std::size_t steps = 0;
  std::vector<std::vector<Tensor>> inputs;
  std::vector<std::vector<std::vector<int>>> last_spike;
  std::vector<std::vector<Tensor>> membrane;
  std::vector<std::vector<std::vector<std::size_t>>> pool_selection;
  DropoutMasks masks;
};

struct SimulationOptions {
  bool record_tape = false;
  // Simulate only layers [0, stop_after_layer]; the remaining layers are
  // skipped and output_potential stays empty.
  std::optional<std::size_t> stop_after_layer;
};

struct SimulationResult {
  // Activity emitted by each layer (spike records for spiking layers).
  std::vector<SpikeTrain> layer_records;
  // Accumulated potential of the output layer after the last step.
  Tensor output_potential;
  // Final LIF state of every spiking layer (empty state otherwise).
  std::vector<LifState> final_states;
  std::optional<BackpropTape> tape;
};

// Clock-driven simulation over input.steps() timesteps. Deterministic in
// (net, input, masks).
SimulationResult forward_simulate(const NetworkSpec& net,
                                  const SpikeTrain& input,
                                  const DropoutMasks& masks = {},
                                  const SimulationOptions& options = {});

// Same, checking that the input spans exactly `steps` timesteps.
SimulationResult forward_simulate(const NetworkSpec& net,
                                  const SpikeTrain& input, std::size_t steps,
                                  const DropoutMasks& masks = {},
                                  const SimulationOptions& options = {});

}  // namespace fshnn
