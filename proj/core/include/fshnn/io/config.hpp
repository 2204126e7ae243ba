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
#include <filesystem>
#include <string>

#include "fshnn/coding/coding.hpp"
#include "fshnn/io/checkpoint.hpp"
#include "fshnn/spiking/lif.hpp"
#include "fshnn/spiking/network.hpp"
#include "fshnn/stdb/stdb.hpp"
#include "fshnn/stdp/stdp.hpp"

namespace fshnn {

struct DataParams {
  std::size_t n_per_class = 30;
  std::size_t size = 16;
  double noise_sigma = 0.1;
};

struct StdpTrainingConfig {
  StdpParams rule;
  std::size_t samples_per_layer = 300;
  double threshold_scale = 0.5;
  // Initial weights drawn uniformly from [init_low, init_high].
  double init_low = 0.4;
  double init_high = 0.6;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  DataParams data;
  LifParams lif;
  EncoderParams encoder;
  StdpTrainingConfig stdp;
  StdbTrainingParams stdb;
  // Extra gain on the He-initialized output layer. Its potential sums over
  // all steps, so a small gain keeps the first logits in range.
  double init_gain = 1.0;
  NetworkSpec network;
};

// Pattern-task defaults for [1,16,16] inputs: conv(4, 5x5, STDP) ->
// spike_maxpool(2) -> fc(32, LIF, backprop) -> fc(3, backprop).
ExperimentConfig default_experiment_config();

// Parses and validates a JSON config on top of the defaults. Unknown keys
// and ill-typed values raise FormatError naming the JSON path; value-range
// problems raise ParameterError. Validation completes before returning.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string experiment_config_to_json(const ExperimentConfig& config);

// Architecture only (no tensors). Layers whose "lif" is `true` take
// `default_lif`.
std::string network_to_json(const NetworkSpec& net);
NetworkSpec network_from_json(const std::string& text, const LifParams& default_lif);

// Entries "layer<i>.weights" / "layer<i>.bias" plus metadata
// {"network": ..., "provenance": <provenance_json>}.
Checkpoint network_to_checkpoint(const NetworkSpec& net,
                                 const std::string& provenance_json = "{}");
// Rejects CRC mismatches, missing tensors and shape mismatches (FormatError).
NetworkSpec network_from_checkpoint(const Checkpoint& ckpt);

}  // namespace fshnn
