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


#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "fshnn/coding/coding.hpp"
#include "fshnn/evaluation/evaluation.hpp"
#include "fshnn/numerics/kernels.hpp"
#include "fshnn/numerics/rng.hpp"
#include "fshnn/spiking/simulate.hpp"

using namespace fshnn;

namespace {

DetectionRecord det(long long image, BBox box, double score, long long label = 1) {
  DetectionRecord d;
  d.image_id = image;
  d.bbox = box;
  d.score = score;
  d.label = label;
  return d;
}

GroundTruth truth(long long image, BBox box, long long label = 1) {
  return {image, box, label};
}

// Lattice values k/100 keep every gap wider than the oracle's grid step.
std::vector<double> lattice_set(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.uniform_int(101)) / 100.0;
  return v;
}

NetworkSpec toy_net() {
  NetworkSpec net;
  net.input_shape = {1, 6, 6};
  net.layers.push_back(LayerSpec::conv2d(3, 3).with_lif(LifParams{}));
  net.layers.push_back(LayerSpec::fc(3));
  Rng rng(7);
  net.initialize_parameters(rng, 2.0);
  return net;
}

}  // namespace

TEST_CASE("categorical entropy") {
  CHECK(categorical_entropy(Tensor::vector({0.5f, 0.25f, 0.25f})) ==
        doctest::Approx(1.03972).epsilon(1e-5));
  CHECK(categorical_entropy(Tensor::vector({1.0f, 0.0f})) == 0.0);
  CHECK_THROWS_AS(categorical_entropy(Tensor::vector({0.5f, 0.6f})), InputError);
  CHECK_THROWS_AS(categorical_entropy(Tensor::vector({1.2f, -0.2f})), InputError);
}

TEST_CASE("IoU") {
  CHECK(iou({0, 0, 2, 2}, {1, 1, 2, 2}) == doctest::Approx(1.0 / 7.0));
  CHECK(iou({0, 0, 2, 2}, {0, 0, 2, 2}) == 1.0);
  CHECK(iou({0, 0, 1, 1}, {2, 2, 1, 1}) == 0.0);
}

TEST_CASE("record validation") {
  CHECK_THROWS_AS(validate(det(1, {0, 0, -1, 2}, 0.5)), InputError);
  CHECK_THROWS_AS(validate(det(1, {0, 0, 1, 2}, 1.5)), InputError);
  DetectionRecord d = det(1, {0, 0, 1, 1}, 0.5);
  d.uncertainty = -0.1;
  CHECK_THROWS_AS(validate(d), InputError);
  CHECK_THROWS_AS(validate(truth(1, {0, 0, 1, 0})), InputError);
}

TEST_CASE("observation grouping") {
  const std::vector<DetectionRecord> dets = {det(1, {0, 0, 2, 2}, 0.9),
                                             det(1, {1, 1, 2, 2}, 0.8)};
  CHECK(group_observations(dets, 0.5).size() == 2);
  const std::vector<DetectionRecord> close = {
      det(1, {0, 0, 2, 2}, 0.9), det(1, {0, 0, 2, 2.2}, 0.7),
      det(2, {0, 0, 2, 2}, 0.6)};
  const auto groups = group_observations(close, 0.5);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].members.size() == 2);
  CHECK(groups[0].score == doctest::Approx(0.8));
  CHECK(groups[0].bbox.h == doctest::Approx(2.1));
}

TEST_CASE("AP reaches 1 when recall 1 arrives before the false positive") {
  const GroundTruth gt = truth(1, {0, 0, 10, 10});
  // IoU 0.7 and 0.3 against the ground truth.
  const BBox a{0, 0, 10, 7};
  const BBox b{0, 0, 10, 3};
  REQUIRE(iou(a, gt.bbox) == doctest::Approx(0.7));
  REQUIRE(iou(b, gt.bbox) == doctest::Approx(0.3));
  const auto report =
      average_precision({det(1, a, 0.9), det(1, b, 0.8)}, {gt}, 0.5);
  CHECK(report.per_class.at(1) == 1.0);
  CHECK(report.mean == 1.0);

  // Reversed scores: precision 1/2 at recall 1.
  const auto late =
      average_precision({det(1, a, 0.8), det(1, b, 0.9)}, {gt}, 0.5);
  CHECK(late.mean == doctest::Approx(0.5));
}

TEST_CASE("AP skips classes without ground truth and averages the rest") {
  const std::vector<GroundTruth> gts = {truth(1, {0, 0, 4, 4}, 1),
                                        truth(1, {5, 5, 4, 4}, 2)};
  const std::vector<DetectionRecord> dets = {
      det(1, {0, 0, 4, 4}, 0.9, 1), det(1, {20, 20, 4, 4}, 0.8, 2),
      det(1, {5, 5, 4, 4}, 0.7, 2), det(1, {5, 5, 4, 4}, 0.6, 3)};
  const auto report = average_precision(dets, gts);
  CHECK(report.per_class.at(1) == 1.0);
  CHECK(report.per_class.at(2) == doctest::Approx(0.5));
  CHECK(report.mean == doctest::Approx(0.75));
  REQUIRE(report.skipped_classes.size() == 1);
  CHECK(report.skipped_classes[0] == 3);
}

TEST_CASE("AR@100 over the IoU sweep") {
  const GroundTruth gt = truth(1, {0, 0, 10, 10});
  CHECK(average_recall_at_k({det(1, gt.bbox, 0.9)}, {gt}, 100) == 1.0);
  const BBox p{0, 0, 10, 7.5};
  REQUIRE(iou(p, gt.bbox) == doctest::Approx(0.75));
  CHECK(average_recall_at_k({det(1, p, 0.9)}, {gt}, 100) == doctest::Approx(0.6));
  // Only the top-k proposals count.
  CHECK(average_recall_at_k({det(1, {50, 50, 2, 2}, 0.9), det(1, gt.bbox, 0.1)},
                            {gt}, 1) == 0.0);
  CHECK_THROWS_AS(average_recall_at_k({}, {gt}, 0), ParameterError);
}

TEST_CASE("uncertainty error on the hand sets") {
  const std::vector<double> correct = {0.1, 0.2, 0.9};
  const std::vector<double> incorrect = {0.3, 0.8};
  CHECK(uncertainty_error(correct, incorrect, 0.25) ==
        doctest::Approx(0.5 / 3.0));
  const auto m = min_uncertainty_error(correct, incorrect);
  CHECK(m.mue == doctest::Approx(1.0 / 6.0));
  CHECK(m.delta > 0.2);
  CHECK(m.delta < 0.3);
}

TEST_CASE("MUE matches a dense grid scan on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto correct = lattice_set(rng, 1 + rng.uniform_int(8));
    const auto incorrect = lattice_set(rng, 1 + rng.uniform_int(8));
    double grid_best = 2.0;
    for (int k = 0; k < 1000; ++k) {
      const double delta = 0.0012 * k - 0.0994;
      double rejected = 0, accepted = 0;
      for (double u : correct) rejected += u > delta;
      for (double u : incorrect) accepted += u <= delta;
      const double ue = 0.5 * rejected / correct.size() +
                        0.5 * accepted / incorrect.size();
      grid_best = std::min(grid_best, ue);
    }
    const auto m = min_uncertainty_error(correct, incorrect);
    CAPTURE(trial);
    CHECK(m.mue == grid_best);
    CHECK(uncertainty_error(correct, incorrect, m.delta) == m.mue);
  }
}

TEST_CASE("MUE extremes") {
  CHECK(min_uncertainty_error({0.1, 0.2}, {0.8, 0.9}).mue == 0.0);
  CHECK(min_uncertainty_error({0.3, 0.6}, {0.3, 0.6}).mue == doctest::Approx(0.5));
  CHECK_THROWS_AS(min_uncertainty_error({}, {0.5}), InputError);
}

TEST_CASE("mCMUE averages per-class values") {
  std::map<long long, ClassUncertainty> per_class;
  // CMUE 0.1: one of five correct values above every incorrect one.
  per_class[1] = {{0.1, 0.1, 0.1, 0.1, 0.9}, {0.5}};
  // CMUE 0.3: six of ten correct values sit above the lone incorrect one.
  per_class[2] = {{0.1, 0.1, 0.1, 0.1, 0.7, 0.7, 0.7, 0.7, 0.7, 0.7}, {0.5}};
  per_class[3] = {{0.2}, {}};
  const auto report = aggregate_mcmue(per_class);
  CHECK(report.cmue.at(1) == doctest::Approx(0.1));
  CHECK(report.cmue.at(2) == doctest::Approx(0.3));
  CHECK(report.cmue.count(3) == 0);
  CHECK(report.mcmue == doctest::Approx(0.2));
  CHECK_THROWS_AS(aggregate_mcmue({{1, {{0.1}, {}}}}), InputError);
}

TEST_CASE("split by correctness") {
  const std::vector<GroundTruth> gts = {truth(1, {0, 0, 4, 4}, 1)};
  std::vector<DetectionRecord> dets = {det(1, {0, 0, 4, 4}, 0.9, 1),
                                       det(1, {0, 0, 4, 4}, 0.8, 1),
                                       det(1, {0, 0, 4, 4}, 0.7, 2),
                                       det(1, {0, 0, 4, 4}, 0.6, 1)};
  dets[0].uncertainty = 0.1;
  dets[1].uncertainty = 0.5;
  dets[2].uncertainty = 0.4;
  const auto split = split_by_correctness(dets, gts);
  REQUIRE(split.count(1) == 1);
  CHECK(split.at(1).correct == std::vector<double>{0.1});
  CHECK(split.at(1).incorrect == std::vector<double>{0.5});
  CHECK(split.at(2).incorrect == std::vector<double>{0.4});
}

TEST_CASE("MC dropout at rate 0 reproduces the deterministic forward") {
  const NetworkSpec net = with_mc_dropout(toy_net(), 0.0);
  REQUIRE(net.layers.size() == 3);
  CHECK(net.layers[1].kind == LayerKind::kDropout);
  Tensor image({1, 6, 6});
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = (i % 5) / 4.0f;
  const auto input = constant_current_encode(image, 20);
  const Tensor reference = softmax(forward_simulate(net, input).output_potential);
  Rng rng(7);
  const auto samples = mc_dropout_infer(net, input, 5, 0.0, rng);
  for (const auto& s : samples) CHECK(s == reference);
  CHECK_THROWS_AS(mc_dropout_infer(net, input, 5, 1.0, rng), ParameterError);
}

TEST_CASE("MC dropout samples vary and are seeded") {
  const NetworkSpec net = with_mc_dropout(toy_net(), 0.2);
  Tensor image({1, 6, 6});
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = (i % 7) / 6.0f;
  const auto input = constant_current_encode(image, 20);
  Rng a(7), b(7);
  const auto s1 = mc_dropout_infer(net, input, 20, 0.2, a);
  const auto s2 = mc_dropout_infer(net, input, 20, 0.2, b);
  CHECK(s1 == s2);
  const auto summary = summarize_samples(s1);
  double var = 0.0;
  for (auto v : summary.variance.data()) var += v;
  CHECK(var > 0.0);
  CHECK(summary.entropy > 0.0);
  CHECK(summary.entropy <= std::log(3.0) + 1e-9);
  float total = 0.0f;
  for (auto v : summary.mean.data()) total += v;
  CHECK(total == doctest::Approx(1.0f));
}
