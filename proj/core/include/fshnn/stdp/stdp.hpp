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
#include <functional>
#include <vector>

#include "fshnn/coding/coding.hpp"
#include "fshnn/numerics/rng.hpp"
#include "fshnn/numerics/tensor.hpp"
#include "fshnn/spiking/network.hpp"
#include "fshnn/spiking/spike_train.hpp"

namespace fshnn {

struct StdpParams {
  double a_ltp = 0.004;
  double a_ltd = 0.003;
  double w_lb = 0.0;
  double w_ub = 1.0;

  void validate() const;
};

// Soft-bounded STDP: with s = (w - w_lb)(w_ub - w),
//   t_pre - t_post <= 0  ->  +a_ltp * s   (potentiation)
//   t_pre - t_post >  0  ->  -a_ltd * s   (depression)
// The caller clamps w + dw into [w_lb, w_ub].
double stdp_delta(double w, int t_pre, int t_post, const StdpParams& params);

// Winner-take-all across channels at each spatial site: where at least one
// channel of `spikes` [C,H,W] fired, keep only the channel with the highest
// membrane potential (ties to the lowest channel).
Tensor apply_cross_depth_inhibition(const Tensor& spikes,
                                    const Tensor& potentials);

// Mean of (w-w_lb)(w_ub-w) / ((w_ub-w_lb)/2)^2: 0 for a fully bimodal
// weight set, 1 when every weight sits at the midpoint.
double stdp_convergence_score(const Tensor& weights, const StdpParams& params);

// Aggregate STDP update of one weighted layer for one presentation, with
// every increment computed from the snapshot `weights` (nearest-spike
// pairing per post spike). `pre` is the activity entering the layer,
// `post` its (post-inhibition) spikes.
Tensor stdp_layer_update(const LayerSpec& layer, const SpikeTrain& pre,
                         const SpikeTrain& post, const StdpParams& params);

// Adds `delta` into the layer weights and clamps to [w_lb, w_ub].
void apply_weight_update(Tensor& weights, const Tensor& delta,
                         const StdpParams& params);

struct StdpStage {
  std::size_t layer = 0;
  std::size_t sample_budget = 0;
  // Multiplies the frozen layer's threshold once its stage completes.
  double threshold_scale = 0.5;
};

using LayerwiseSchedule = std::vector<StdpStage>;

// One stage per stdp-tagged layer, in order.
LayerwiseSchedule default_schedule(const NetworkSpec& net,
                                   std::size_t samples_per_stage,
                                   double threshold_scale = 0.5);

struct StdpStageReport {
  std::size_t layer = 0;
  std::size_t samples = 0;
  // Convergence score after every pass over the data (or at the end of the
  // budget for the final partial pass).
  std::vector<double> convergence;
};

struct StdpTrainingReport {
  std::vector<StdpStageReport> stages;
};

// Layer-wise unsupervised training. Stage k trains its layer with STDP and
// cross-depth inhibition on Poisson-encoded samples; afterwards the layer
// is frozen, its inhibition disabled and its threshold scaled down. Draws
// come from `rng` in sample order, so a fixed seed fixes the result.
StdpTrainingReport train_stdp_layerwise(NetworkSpec& net,
                                        const std::vector<Tensor>& data,
                                        const LayerwiseSchedule& schedule,
                                        const EncoderParams& encoder,
                                        const StdpParams& params, Rng& rng);

// Uniform(lo, hi) initialization of the stdp-tagged layers' weights.
void initialize_stdp_weights(NetworkSpec& net, Rng& rng, double lo = 0.4,
                             double hi = 0.6);

}  // namespace fshnn
