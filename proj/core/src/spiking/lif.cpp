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

#include "fshnn/spiking/lif.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fshnn {

void LifParams::validate() const {
  if (!(tau_m > 0.0)) throw ParameterError("LIF tau_m must be > 0");
  if (!(dt > 0.0)) throw ParameterError("LIF dt must be > 0");
  if (!(v_reset < v_threshold)) {
    throw ParameterError("LIF v_reset (" + std::to_string(v_reset) +
                         ") must be below v_threshold (" +
                         std::to_string(v_threshold) + ")");
  }
  if (!std::isfinite(r_resistance)) {
    throw ParameterError("LIF resistance must be finite");
  }
}

double LifParams::to_millivolts(double v_normalized) const {
  const double scale =
      (kThresholdMillivolts - kResetMillivolts) / (v_threshold - v_reset);
  return kResetMillivolts + (v_normalized - v_reset) * scale;
}

double LifParams::from_millivolts(double v_millivolts) const {
  const double scale =
      (v_threshold - v_reset) / (kThresholdMillivolts - kResetMillivolts);
  return v_reset + (v_millivolts - kResetMillivolts) * scale;
}

LifParams LifParams::millivolt_table() {
  LifParams p;
  p.r_resistance = 1.0;
  p.tau_m = 10.0;
  p.v_threshold = kThresholdMillivolts;
  p.v_reset = kResetMillivolts;
  return p;
}

LifParams LifParams::integrate_and_fire(double v_threshold) {
  LifParams p;
  p.tau_m = 1e6;
  p.r_resistance = p.tau_m;
  p.v_threshold = v_threshold;
  p.v_reset = 0.0;
  p.reset = ResetMode::kSubtract;
  return p;
}

LifState LifState::resting(const Shape& shape, const LifParams& params) {
  LifState s;
  s.v = Tensor(shape, static_cast<float>(params.v_reset));
  s.last_spike.assign(s.v.size(), kNeverSpiked);
  return s;
}

void lif_integrate(LifState& state, const Tensor& input_current,
                   const LifParams& params) {
  require_same_shape(state.v.shape(), input_current.shape(), "lif_step");
  const auto leak = static_cast<float>(params.dt / params.tau_m);
  const auto gain = static_cast<float>(params.input_gain());
  for (std::size_t i = 0; i < state.v.size(); ++i) {
    const float current = input_current[i];
    if (!std::isfinite(current)) {
      throw NumericError("non-finite input current at neuron " +
                         std::to_string(i));
    }
    state.v[i] += gain * current - leak * state.v[i];
  }
}

Tensor lif_threshold(const LifState& state, const LifParams& params) {
  Tensor crossed(state.v.shape());
  const auto threshold = static_cast<float>(params.v_threshold);
  for (std::size_t i = 0; i < state.v.size(); ++i) {
    crossed[i] = state.v[i] > threshold ? 1.0f : 0.0f;
  }
  return crossed;
}

void lif_fire(LifState& state, const Tensor& crossed, const Tensor& fired,
              const LifParams& params) {
  const auto threshold = static_cast<float>(params.v_threshold);
  const auto reset = static_cast<float>(params.v_reset);
  for (std::size_t i = 0; i < state.v.size(); ++i) {
    if (crossed[i] == 0.0f) continue;
    if (params.reset == ResetMode::kSubtract && fired[i] != 0.0f) {
      // At most one spike per step; clamp so v never sits above threshold.
      state.v[i] = std::min(state.v[i] - (threshold - reset), threshold);
    } else {
      state.v[i] = reset;
    }
    if (fired[i] != 0.0f) state.last_spike[i] = state.step;
  }
  ++state.step;
}

Tensor lif_step(LifState& state, const Tensor& input_current,
                const LifParams& params) {
  lif_integrate(state, input_current, params);
  Tensor spikes = lif_threshold(state, params);
  lif_fire(state, spikes, spikes, params);
  return spikes;
}

}  // namespace fshnn
