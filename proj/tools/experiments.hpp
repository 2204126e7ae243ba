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
#include <cstdint>
#include <vector>

#include "fshnn/io/config.hpp"
#include "fshnn/io/idx.hpp"
#include "fshnn/tailindex/tailindex.hpp"

namespace fshnn::tools {

// Pattern data set of exactly n samples (classes interleaved).
LabeledDataset pattern_dataset(const ExperimentConfig& config, std::size_t n,
                               std::uint64_t seed);

// Fresh network from the config: He init for every weighted layer with the
// output layer scaled by config.init_gain, then uniform STDP init for
// stdp-tagged layers.
NetworkSpec initialized_network(const ExperimentConfig& config, Rng& rng);

struct NoiseRun {
  std::vector<double> noise;
  TailIndexEstimate estimate;
};

// Two-layer ReLU testbed on flattened, unit-normalized patterns with targets
// label - 1 in {-1, 0, 1}.
NoiseRun sgd_noise_run(const ExperimentConfig& config, std::size_t n,
                       std::size_t batch_size, std::size_t passes,
                       std::size_t width, std::uint64_t seed);

// Update noise of the first stdp-tagged layer of the config network.
NoiseRun stdp_noise_run(const ExperimentConfig& config, std::size_t n,
                        std::size_t batch_size, std::size_t passes,
                        std::uint64_t seed);

// ANN twin of an SNN spec: LIF removed, ReLU on hidden weighted layers,
// spike_maxpool replaced by maxpool, every weighted layer re-initialized.
NetworkSpec ann_twin(const NetworkSpec& snn, Rng& rng);

}  // namespace fshnn::tools
