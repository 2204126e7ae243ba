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

#include "experiments.hpp"

#include <algorithm>

#include "fshnn/error.hpp"

namespace fshnn::tools {

LabeledDataset pattern_dataset(const ExperimentConfig& config, std::size_t n,
                               std::uint64_t seed) {
  if (n == 0) throw ParameterError("data set size must be >= 1");
  auto ds = generate_synthetic_patterns((n + 2) / 3, config.data.size,
                                        config.data.noise_sigma, seed);
  ds.images.resize(n, Tensor({1}));
  ds.labels.resize(n);
  return ds;
}

NetworkSpec initialized_network(const ExperimentConfig& config, Rng& rng) {
  NetworkSpec net = config.network;
  // Hidden layers get plain He init so they spike; the output layer sums
  // potentials over every step, so init_gain shrinks it.
  net.initialize_parameters(rng, 1.0);
  for (auto& w : net.layers.back().weights.data()) {
    w = static_cast<float>(w * config.init_gain);
  }
  initialize_stdp_weights(net, rng, config.stdp.init_low, config.stdp.init_high);
  return net;
}

NoiseRun sgd_noise_run(const ExperimentConfig& config, std::size_t n,
                       std::size_t batch_size, std::size_t passes,
                       std::size_t width, std::uint64_t seed) {
  const auto ds = pattern_dataset(config, n, seed);
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& img = ds.images[i];
    std::vector<double> flat(img.data().begin(), img.data().end());
    xs.push_back(unit_normalize(flat));
    ys.push_back(static_cast<double>(ds.labels[i]) - 1.0);
  }
  Rng rng(seed, 0x5ed);
  const auto net = init_two_layer(xs.front().size(), width, 1.0, rng);
  NoiseRun run;
  run.noise = collect_sgd_gradient_noise(net, xs, ys, batch_size, passes, rng);
  run.estimate = estimate_tail_index(run.noise);
  return run;
}

NoiseRun stdp_noise_run(const ExperimentConfig& config, std::size_t n,
                        std::size_t batch_size, std::size_t passes,
                        std::uint64_t seed) {
  const auto ds = pattern_dataset(config, n, seed);
  Rng rng(seed, 0x57d9);
  const NetworkSpec net = initialized_network(config, rng);
  std::size_t layer = net.layers.size();
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (net.layers[l].tag == LearningTag::kStdp && net.layers[l].is_spiking()) {
      layer = l;
      break;
    }
  }
  if (layer == net.layers.size()) {
    throw ParameterError("config network has no spiking stdp layer");
  }
  NetworkSpec probe = net;
  probe.layers[layer].inhibition = probe.layers[layer].kind == LayerKind::kConv2d;
  NoiseRun run;
  run.noise = collect_stdp_update_noise(probe, layer, ds.images, batch_size, passes,
                                        config.encoder, config.stdp.rule, rng);
  run.estimate = estimate_tail_index(run.noise);
  return run;
}

NetworkSpec ann_twin(const NetworkSpec& snn, Rng& rng) {
  NetworkSpec ann = snn;
  for (std::size_t l = 0; l < ann.layers.size(); ++l) {
    auto& layer = ann.layers[l];
    layer.lif.reset();
    layer.inhibition = false;
    layer.tag = LearningTag::kBackprop;
    if (layer.kind == LayerKind::kSpikeMaxPool) layer.kind = LayerKind::kMaxPool;
    const bool hidden = l + 1 < ann.layers.size();
    layer.activation =
        layer.has_weights() && hidden ? Activation::kRelu : Activation::kNone;
  }
  ann.initialize_parameters(rng, 1.0);
  ann.validate_ann();
  return ann;
}

}  // namespace fshnn::tools
