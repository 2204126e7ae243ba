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

#include <cstdint>
#include <vector>

#include "fshnn/numerics/tensor.hpp"
#include "fshnn/spiking/network.hpp"
#include "fshnn/spiking/spike_train.hpp"

namespace fshnn {

// Per-operation energies in picojoules (45 nm).
struct EnergyConstants {
  double e_mac_pj = 4.6;
  double e_ac_pj = 0.9;

  static EnergyConstants float32() { return {}; }
  static EnergyConstants int32() { return {3.2, 0.1}; }
  void validate() const;
};

struct OpCount {
  std::vector<std::uint64_t> per_layer;
  std::uint64_t total = 0;
  // Measured counts already sum over every timestep of the record.
  bool measured = false;
};

// One MAC per weight-input product: fc n_in*n_out, conv C_out*H'*W'*C_in*k^2,
// everything else 0. Bias adds are not counted.
OpCount count_mac_flops(const NetworkSpec& spec, const Shape& input_shape);

// Structural mode: the MAC formula, read as ACs per timestep.
OpCount count_ac_flops(const NetworkSpec& spec, const Shape& input_shape);

// Measured mode: one AC per presynaptic event (non-zero entry) times the
// exact fan-out of that presynaptic unit, summed over the record.
// `layer_records` are the per-layer activity trains of a simulation.
OpCount count_ac_flops(const NetworkSpec& spec, const SpikeTrain& input,
                       const std::vector<SpikeTrain>& layer_records);

enum class EnergyMode { kAnn, kSnn };

// Joules. ann: total * e_mac. snn: total * e_ac * T for structural counts;
// measured counts already include time and are multiplied by e_ac only.
double inference_energy(const OpCount& count, const EnergyConstants& constants,
                        EnergyMode mode, std::size_t timesteps = 1);

// e_ann / e_snn; e_snn <= 0 raises ParameterError.
double efficiency_ratio(double e_ann, double e_snn);

}  // namespace fshnn
