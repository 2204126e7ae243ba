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

#include "fshnn/stdp/stdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fshnn/spiking/simulate.hpp"

namespace fshnn {

void StdpParams::validate() const {
  if (!(w_lb < w_ub)) throw ParameterError("STDP needs w_lb < w_ub");
  if (!(a_ltp > 0.0) || !(a_ltd > 0.0)) {
    throw ParameterError("STDP learning rates must be > 0");
  }
}

double stdp_delta(double w, int t_pre, int t_post, const StdpParams& params) {
  if (w < params.w_lb || w > params.w_ub) {
    throw ParameterError("STDP weight " + std::to_string(w) +
                         " outside [" + std::to_string(params.w_lb) + ", " +
                         std::to_string(params.w_ub) + "]");
  }
  const double stabilizer = (w - params.w_lb) * (params.w_ub - w);
  if (t_pre - t_post <= 0) return params.a_ltp * stabilizer;
  return -params.a_ltd * stabilizer;
}

Tensor apply_cross_depth_inhibition(const Tensor& spikes,
                                    const Tensor& potentials) {
  require_same_shape(spikes.shape(), potentials.shape(),
                     "apply_cross_depth_inhibition");
  if (spikes.rank() != 3) {
    throw DimensionError("cross-depth inhibition expects [C,H,W] spikes");
  }
  const std::size_t c = spikes.dim(0), plane = spikes.dim(1) * spikes.dim(2);
  Tensor out(spikes.shape());
  for (std::size_t site = 0; site < plane; ++site) {
    std::size_t winner = c;
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t idx = ch * plane + site;
      if (spikes[idx] == 0.0f) continue;
      if (winner == c || potentials[idx] > potentials[winner * plane + site]) {
        winner = ch;
      }
    }
    if (winner != c) out[winner * plane + site] = 1.0f;
  }
  return out;
}

double stdp_convergence_score(const Tensor& weights, const StdpParams& params) {
  if (weights.empty()) return 0.0;
  const double half = (params.w_ub - params.w_lb) / 2.0;
  const double norm = half * half;
  double total = 0.0;
  for (auto w : weights.data()) {
    total += (w - params.w_lb) * (params.w_ub - w) / norm;
  }
  return total / static_cast<double>(weights.size());
}

namespace {

std::vector<std::vector<int>> spike_times(const SpikeTrain& train) {
  std::vector<std::vector<int>> times(train.neurons());
  for (std::size_t t = 0; t < train.steps(); ++t) {
    const Tensor& f = train.frame(t);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] != 0.0f) times[i].push_back(static_cast<int>(t));
    }
  }
  return times;
}

// Nearest presynaptic spike to t_post; ties go to the earlier one. A silent
// presynaptic neuron counts as firing after the post spike.
int nearest_pre_time(const std::vector<int>& pre_times, int t_post) {
  if (pre_times.empty()) return t_post + 1;
  auto it = std::upper_bound(pre_times.begin(), pre_times.end(), t_post);
  if (it == pre_times.begin()) return *it;
  const int before = *std::prev(it);
  if (it == pre_times.end()) return before;
  return (t_post - before) <= (*it - t_post) ? before : *it;
}

}  // namespace

Tensor stdp_layer_update(const LayerSpec& layer, const SpikeTrain& pre,
                         const SpikeTrain& post, const StdpParams& params) {
  params.validate();
  if (!layer.has_weights()) {
    throw StructuralError("STDP needs a conv2d or fc layer");
  }
  const auto pre_times = spike_times(pre);
  const auto post_times = spike_times(post);
  const Tensor& w = layer.weights;
  Tensor delta(w.shape());

  auto pair = [&](std::size_t w_index, std::size_t pre_index,
                  const std::vector<int>& posts) {
    const double weight = w[w_index];
    double acc = 0.0;
    for (int t_post : posts) {
      acc += stdp_delta(weight, nearest_pre_time(pre_times[pre_index], t_post),
                        t_post, params);
    }
    delta[w_index] += static_cast<float>(acc);
  };

  if (layer.kind == LayerKind::kFc) {
    const std::size_t m = w.dim(0), n = w.dim(1);
    if (pre.neurons() != n || post.neurons() != m) {
      throw StructuralError("STDP records do not match fc layer shape");
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (post_times[i].empty()) continue;
      for (std::size_t j = 0; j < n; ++j) pair(i * n + j, j, post_times[i]);
    }
    return delta;
  }

  const Shape& in = pre.frame_shape();
  const Shape& out = post.frame_shape();
  if (in.size() != 3 || out.size() != 3 || in[0] != w.dim(1) ||
      out[0] != w.dim(0)) {
    throw StructuralError("STDP records do not match conv layer shape");
  }
  const std::size_t k = layer.kernel;
  const auto pad = static_cast<std::ptrdiff_t>(layer.padding);
  for (std::size_t o = 0; o < out[0]; ++o) {
    for (std::size_t y = 0; y < out[1]; ++y) {
      for (std::size_t x = 0; x < out[2]; ++x) {
        const auto& posts = post_times[(o * out[1] + y) * out[2] + x];
        if (posts.empty()) continue;
        for (std::size_t c = 0; c < in[0]; ++c) {
          for (std::size_t ky = 0; ky < k; ++ky) {
            const auto iy =
                static_cast<std::ptrdiff_t>(y * layer.stride + ky) - pad;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in[1])) continue;
            for (std::size_t kx = 0; kx < k; ++kx) {
              const auto ix =
                  static_cast<std::ptrdiff_t>(x * layer.stride + kx) - pad;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in[2])) continue;
              const std::size_t pre_index =
                  (c * in[1] + static_cast<std::size_t>(iy)) * in[2] +
                  static_cast<std::size_t>(ix);
              pair(((o * in[0] + c) * k + ky) * k + kx, pre_index, posts);
            }
          }
        }
      }
    }
  }
  return delta;
}

void apply_weight_update(Tensor& weights, const Tensor& delta,
                         const StdpParams& params) {
  require_same_shape(weights.shape(), delta.shape(), "apply_weight_update");
  const auto lo = static_cast<float>(params.w_lb);
  const auto hi = static_cast<float>(params.w_ub);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = std::clamp(weights[i] + delta[i], lo, hi);
  }
}

LayerwiseSchedule default_schedule(const NetworkSpec& net,
                                   std::size_t samples_per_stage,
                                   double threshold_scale) {
  LayerwiseSchedule schedule;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (net.layers[i].tag == LearningTag::kStdp) {
      schedule.push_back({i, samples_per_stage, threshold_scale});
    }
  }
  return schedule;
}

void initialize_stdp_weights(NetworkSpec& net, Rng& rng, double lo, double hi) {
  net.allocate_parameters();
  for (auto& layer : net.layers) {
    if (layer.tag != LearningTag::kStdp || !layer.has_weights()) continue;
    for (auto& w : layer.weights.data()) {
      w = static_cast<float>(lo + (hi - lo) * rng.uniform());
    }
  }
}

StdpTrainingReport train_stdp_layerwise(NetworkSpec& net,
                                        const std::vector<Tensor>& data,
                                        const LayerwiseSchedule& schedule,
                                        const EncoderParams& encoder,
                                        const StdpParams& params, Rng& rng) {
  params.validate();
  encoder.validate();
  if (data.empty()) throw InputError("STDP training needs a non-empty data set");
  const bool has_stdp_layer =
      std::any_of(net.layers.begin(), net.layers.end(),
                  [](const LayerSpec& l) { return l.tag == LearningTag::kStdp; });
  if (!has_stdp_layer) {
    throw ParameterError("network has no stdp-tagged layer to train");
  }
  net.validate_snn();

  std::size_t previous = 0;
  bool first = true;
  for (const auto& stage : schedule) {
    if (stage.layer >= net.layers.size() ||
        net.layers[stage.layer].tag != LearningTag::kStdp ||
        !net.layers[stage.layer].is_spiking()) {
      throw ParameterError("schedule stage targets layer " +
                           std::to_string(stage.layer) +
                           ", which is not a spiking stdp-tagged layer");
    }
    if (!first && stage.layer <= previous) {
      throw ParameterError("schedule stages must follow layer order");
    }
    if (!(stage.threshold_scale > 0.0 && stage.threshold_scale <= 1.0)) {
      throw ParameterError("threshold_scale must be in (0,1]");
    }
    previous = stage.layer;
    first = false;
  }

  StdpTrainingReport report;
  for (const auto& stage : schedule) {
    auto& layer = net.layers[stage.layer];
    layer.inhibition = layer.kind == LayerKind::kConv2d;
    StdpStageReport stage_report;
    stage_report.layer = stage.layer;

    SimulationOptions options;
    options.stop_after_layer = stage.layer;
    for (std::size_t s = 0; s < stage.sample_budget; ++s) {
      const Tensor& image = data[s % data.size()];
      const SpikeTrain input = poisson_encode(image, encoder, rng);
      const auto sim = forward_simulate(net, input, {}, options);
      const SpikeTrain& pre =
          stage.layer == 0 ? input : sim.layer_records[stage.layer - 1];
      const Tensor delta = stdp_layer_update(
          layer, pre, sim.layer_records[stage.layer], params);
      apply_weight_update(layer.weights, delta, params);
      const bool pass_done = (s + 1) % data.size() == 0;
      if (pass_done || s + 1 == stage.sample_budget) {
        stage_report.convergence.push_back(
            stdp_convergence_score(layer.weights, params));
      }
    }
    stage_report.samples = stage.sample_budget;

    layer.tag = LearningTag::kFrozen;
    layer.inhibition = false;
    auto& lif = *layer.lif;
    lif.v_threshold =
        lif.v_reset + stage.threshold_scale * (lif.v_threshold - lif.v_reset);
    report.stages.push_back(std::move(stage_report));
  }
  return report;
}

}  // namespace fshnn
