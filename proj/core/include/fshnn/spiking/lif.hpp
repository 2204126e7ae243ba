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

namespace fshnn {

enum class ResetMode {
  kToValue,   // v = v_reset after a spike
  kSubtract,  // v -= (v_threshold - v_reset); used by converted networks
};

// Leaky integrate-and-fire parameters, explicit Euler with step dt:
//   v <- v + (dt / tau_m) * (-v + R * I)
// Potentials are in a normalized scale (v_reset = 0, v_threshold = 1 by
// default). `to_millivolts` maps them affinely onto the physiological
// convention (reset -80 mV, threshold -40 mV).
struct LifParams {
  double r_resistance = 1.0;
  double tau_m = 10.0;
  double v_threshold = 1.0;
  double v_reset = 0.0;
  double dt = 1.0;
  ResetMode reset = ResetMode::kToValue;

  static constexpr double kThresholdMillivolts = -40.0;
  static constexpr double kResetMillivolts = -80.0;

  void validate() const;

  // Per-step gain of the input current, dt * R / tau_m.
  double input_gain() const { return dt * r_resistance / tau_m; }

  double to_millivolts(double v_normalized) const;
  double from_millivolts(double v_millivolts) const;

  // The same neuron expressed directly in millivolts (R=1, tau_m=10,
  // threshold -40, reset -80).
  static LifParams millivolt_table();

  // Practically non-leaky neuron (tau_m = 1e6 steps, unit input gain) with
  // reset-by-subtraction, the rate-coding workhorse of converted networks.
  static LifParams integrate_and_fire(double v_threshold);

  friend bool operator==(const LifParams&, const LifParams&) = default;
};

inline constexpr int kNeverSpiked = -1;

struct LifState {
  Tensor v;
  // Timestep of the most recent spike, kNeverSpiked if none.
  std::vector<int> last_spike;
  // Number of completed steps; the next call to lif_step runs step `step`.
  int step = 0;

  static LifState resting(const Shape& shape, const LifParams& params);
};

// One Euler step. Returns the {0,1} spike tensor and updates `state` in
// place (potentials, last_spike, step counter).
Tensor lif_step(LifState& state, const Tensor& input_current,
                const LifParams& params);

// The two halves of lif_step, used when a competition (cross-depth
// inhibition) must see the pre-reset potentials before deciding who fires.
void lif_integrate(LifState& state, const Tensor& input_current,
                   const LifParams& params);
Tensor lif_threshold(const LifState& state, const LifParams& params);
// Resets every neuron flagged in `crossed` and stamps last_spike for the
// ones flagged in `fired` (fired is a subset of crossed). Advances the step.
void lif_fire(LifState& state, const Tensor& crossed, const Tensor& fired,
              const LifParams& params);

}  // namespace fshnn
