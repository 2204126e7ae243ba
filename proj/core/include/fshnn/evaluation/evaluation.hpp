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

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fshnn/numerics/rng.hpp"
#include "fshnn/numerics/tensor.hpp"
#include "fshnn/spiking/network.hpp"
#include "fshnn/spiking/spike_train.hpp"

namespace fshnn {

// H = -sum p ln p with 0 ln 0 = 0. Throws InputError if |sum p - 1| > 1e-4
// or any entry is negative.
double categorical_entropy(const Tensor& p);

// n_samples stochastic forward passes; each draws fresh dropout masks with
// the given rate (held fixed over the timesteps of that pass) and returns
// the softmax of the accumulated output potential.
std::vector<Tensor> mc_dropout_infer(const NetworkSpec& net,
                                     const SpikeTrain& input,
                                     std::size_t n_samples, double dropout_rate,
                                     Rng& rng);

// Copy of `net` with a dropout layer (given rate) after every conv2d layer
// that is not already followed by one.
NetworkSpec with_mc_dropout(const NetworkSpec& net, double rate);

struct McSummary {
  Tensor mean;
  Tensor variance;
  double entropy = 0.0;
};

// Elementwise mean and population variance of the sampled score vectors,
// plus the entropy of the mean.
McSummary summarize_samples(const std::vector<Tensor>& samples);

struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct DetectionRecord {
  long long image_id = 0;
  BBox bbox;
  double score = 0.0;
  long long label = 0;
  std::optional<double> uncertainty;
  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

struct GroundTruth {
  long long image_id = 0;
  BBox bbox;
  long long label = 0;
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// Throws InputError on non-positive extents, a score outside [0,1] or a
// negative uncertainty.
void validate(const DetectionRecord& det);
void validate(const GroundTruth& gt);

double iou(const BBox& a, const BBox& b);

struct Observation {
  long long image_id = 0;
  long long label = 0;
  BBox bbox;
  double score = 0.0;
  std::vector<std::size_t> members;
};

// Greedy clustering of detections pooled from several MC samples. The best
// ungrouped detection seeds a group; same-image, same-label detections with
// IoU >= threshold against the seed join it. Group box and score are member
// means.
std::vector<Observation> group_observations(
    const std::vector<DetectionRecord>& detections, double iou_threshold = 0.5);

struct ApReport {
  std::map<long long, double> per_class;
  double mean = 0.0;
  // Classes with detections but no ground truth; skipped.
  std::vector<long long> skipped_classes;
};

// All-point interpolated AP per class, greedy score-ordered matching.
ApReport average_precision(const std::vector<DetectionRecord>& detections,
                           const std::vector<GroundTruth>& ground_truths,
                           double iou_threshold = 0.5);

inline constexpr std::array<double, 10> kRecallIouThresholds = {
    0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};

// Recall of the top-k proposals per image, averaged over
// kRecallIouThresholds. A proposal may cover any GT of its image regardless
// of label; each GT counts once.
double average_recall_at_k(const std::vector<DetectionRecord>& proposals,
                           const std::vector<GroundTruth>& ground_truths,
                           std::size_t k);

double uncertainty_error(const std::vector<double>& correct,
                         const std::vector<double>& incorrect, double delta);

struct MinUncertaintyError {
  double mue = 0.0;
  double delta = 0.0;
};

MinUncertaintyError min_uncertainty_error(const std::vector<double>& correct,
                                          const std::vector<double>& incorrect);

struct ClassUncertainty {
  std::vector<double> correct;
  std::vector<double> incorrect;
};

struct UncertaintyReport {
  std::map<long long, double> cmue;
  std::map<long long, double> delta;
  double mcmue = 0.0;
};

// CMUE per class with both sets non-empty; mCMUE is their unweighted mean.
UncertaintyReport aggregate_mcmue(
    const std::map<long long, ClassUncertainty>& per_class);

// Splits detections into correct (label match, IoU >= threshold with an
// unclaimed GT, score order) and incorrect, grouped by predicted label.
// Detections without an uncertainty value are skipped.
std::map<long long, ClassUncertainty> split_by_correctness(
    const std::vector<DetectionRecord>& detections,
    const std::vector<GroundTruth>& ground_truths, double iou_threshold = 0.5);

}  // namespace fshnn
