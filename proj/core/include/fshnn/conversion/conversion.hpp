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
#include <vector>

#include "fshnn/numerics/rng.hpp"
#include "fshnn/numerics/tensor.hpp"
#include "fshnn/spiking/network.hpp"

namespace fshnn {

// A NetworkSpec with ReLU hidden layers, a linear output layer and no LIF
// parameters. Checked by NetworkSpec::validate_ann().
using AnnCheckpoint = NetworkSpec;

struct AnnForwardResult {
  Tensor output;
  // Per layer: value before the activation and after it.
  std::vector<Tensor> pre_activations;
  std::vector<Tensor> activations;
};

AnnForwardResult ann_forward(const AnnCheckpoint& ann, const Tensor& input);

struct CalibrationStats {
  // Per layer: max pre-activation (clamped at 0) over the calibration set.
  std::vector<double> layer_max;
  // Per layer: max activation per channel ([C,H,W] outputs) or per neuron
  // ([n] outputs).
  std::vector<std::vector<double>> channel_max;
};

// Max-reduction over the calibration set; order-independent.
CalibrationStats collect_calibration_stats(const AnnCheckpoint& ann,
                                           const std::vector<Tensor>& data);

struct LayerThreshold {
  std::size_t layer = 0;
  double threshold = 0.0;
};

// Threshold balancing: one threshold per hidden ReLU layer, equal to the
// largest pre-activation it produced on the calibration data. Weights are
// not touched. A layer whose pre-activations never exceed 0 is degenerate
// and raises InputError.
std::vector<LayerThreshold> balance_thresholds(const AnnCheckpoint& ann,
                                               const std::vector<Tensor>& data);

inline constexpr double kChannelEpsilon = 1e-6;

// Channel-wise normalization: the incoming weights (and bias) of every
// hidden channel c are divided by its maximum activation lambda_c and the
// weights leaving that channel are multiplied by lambda_c, so each channel
// spans the full rate range at threshold 1. Maxima below kChannelEpsilon
// use kChannelEpsilon. The output layer only receives the outgoing scaling.
AnnCheckpoint channel_normalize(const AnnCheckpoint& ann,
                                const CalibrationStats& stats);

enum class NormalizationMode { kLayer, kChannel };

// Rewrites a ReLU network as a rate-coded SNN:
//  - hidden ReLU layers become integrate-and-fire layers (reset by
//    subtraction). Layer mode: threshold = layer max, incoming weights
//    scaled by the previous layer's max. Channel mode: channel_normalize
//    and threshold 1.
//  - maxpool becomes spike_maxpool; avgpool/dropout are kept.
//  - the output layer becomes a non-spiking potential accumulator.
//  - weighted layers are tagged backprop, ready for STDB fine-tuning.
NetworkSpec convert_ann_to_snn(const AnnCheckpoint& ann,
                               const CalibrationStats& stats,
                               NormalizationMode mode);

struct AnnTrainingParams {
  std::size_t epochs = 100;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t batch_size = 16;
  // Stop as soon as an epoch classifies every sample correctly.
  bool stop_at_perfect = true;
};

// Plain minibatch SGD with softmax cross-entropy for the reference ANN.
// Returns the final-epoch training accuracy.
double train_ann_classifier(AnnCheckpoint& ann, const std::vector<Tensor>& images,
                            const std::vector<std::size_t>& labels,
                            const AnnTrainingParams& params, Rng& rng);

std::size_t ann_predict(const AnnCheckpoint& ann, const Tensor& input);

}  // namespace fshnn
