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

#include "fshnn/evaluation/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "fshnn/error.hpp"
#include "fshnn/numerics/kernels.hpp"
#include "fshnn/spiking/simulate.hpp"

namespace fshnn {

double categorical_entropy(const Tensor& p) {
  double sum = 0.0;
  double h = 0.0;
  for (const float v : p.data()) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw InputError("probability vector has a negative or non-finite entry");
    }
    sum += v;
    if (v > 0.0f) h -= static_cast<double>(v) * std::log(static_cast<double>(v));
  }
  if (std::abs(sum - 1.0) > 1e-4) {
    throw InputError("probability vector sums to " + std::to_string(sum));
  }
  return h;
}

std::vector<Tensor> mc_dropout_infer(const NetworkSpec& net,
                                     const SpikeTrain& input,
                                     std::size_t n_samples, double dropout_rate,
                                     Rng& rng) {
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ParameterError("dropout rate must lie in [0, 1)");
  }
  if (n_samples == 0) throw ParameterError("n_samples must be >= 1");
  std::vector<Tensor> scores;
  scores.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const auto masks = draw_network_masks(net, rng, dropout_rate);
    const auto result = forward_simulate(net, input, masks);
    scores.push_back(softmax(result.output_potential));
  }
  return scores;
}

NetworkSpec with_mc_dropout(const NetworkSpec& net, double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ParameterError("dropout rate must lie in [0, 1)");
  }
  NetworkSpec out;
  out.input_shape = net.input_shape;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    out.layers.push_back(net.layers[l]);
    const bool followed = l + 1 < net.layers.size() &&
                          net.layers[l + 1].kind == LayerKind::kDropout;
    if (net.layers[l].kind == LayerKind::kConv2d && !followed &&
        l + 1 < net.layers.size()) {
      out.layers.push_back(LayerSpec::dropout(rate));
    }
  }
  return out;
}

McSummary summarize_samples(const std::vector<Tensor>& samples) {
  if (samples.empty()) throw InputError("no samples to summarize");
  McSummary out;
  const Shape shape = samples.front().shape();
  TensorD mean(shape), sq(shape);
  for (const auto& s : samples) {
    require_same_shape(s.shape(), shape, "MC sample");
    for (std::size_t i = 0; i < s.size(); ++i) {
      mean[i] += s[i];
      sq[i] += static_cast<double>(s[i]) * s[i];
    }
  }
  const double n = static_cast<double>(samples.size());
  out.mean = Tensor(shape);
  out.variance = Tensor(shape);
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double m = mean[i] / n;
    out.mean[i] = static_cast<float>(m);
    out.variance[i] = static_cast<float>(std::max(0.0, sq[i] / n - m * m));
  }
  // Renormalize the float mean before the entropy check.
  double total = 0.0;
  for (const float v : out.mean.data()) total += v;
  Tensor normalized = out.mean;
  for (auto& v : normalized.data()) v = static_cast<float>(v / total);
  out.entropy = categorical_entropy(normalized);
  return out;
}

void validate(const DetectionRecord& det) {
  if (!(det.bbox.w > 0.0 && det.bbox.h > 0.0)) {
    throw InputError("detection box must have positive width and height");
  }
  if (!(det.score >= 0.0 && det.score <= 1.0)) {
    throw InputError("detection score must lie in [0, 1]");
  }
  if (det.uncertainty && !(*det.uncertainty >= 0.0)) {
    throw InputError("uncertainty must be non-negative");
  }
}

void validate(const GroundTruth& gt) {
  if (!(gt.bbox.w > 0.0 && gt.bbox.h > 0.0)) {
    throw InputError("ground-truth box must have positive width and height");
  }
}

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

std::vector<std::size_t> order_by_score(const std::vector<DetectionRecord>& d) {
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return d[a].score > d[b].score;
  });
  return order;
}

// Greedy score-ordered matching. Returns, per detection, whether it claimed
// a GT. `same_label` restricts candidates to the detection's label.
std::vector<bool> greedy_match(const std::vector<DetectionRecord>& dets,
                               const std::vector<std::size_t>& order,
                               const std::vector<GroundTruth>& gts,
                               double threshold, bool same_label) {
  std::vector<bool> claimed(gts.size(), false);
  std::vector<bool> matched(dets.size(), false);
  for (const std::size_t di : order) {
    const auto& det = dets[di];
    double best = -1.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (claimed[g] || gts[g].image_id != det.image_id) continue;
      if (same_label && gts[g].label != det.label) continue;
      const double o = iou(det.bbox, gts[g].bbox);
      if (o >= threshold && o > best) {
        best = o;
        best_gt = g;
      }
    }
    if (best_gt < gts.size()) {
      claimed[best_gt] = true;
      matched[di] = true;
    }
  }
  return matched;
}

}  // namespace

std::vector<Observation> group_observations(
    const std::vector<DetectionRecord>& detections, double iou_threshold) {
  const auto order = order_by_score(detections);
  std::vector<bool> used(detections.size(), false);
  std::vector<Observation> groups;
  for (const std::size_t seed : order) {
    if (used[seed]) continue;
    const auto& s = detections[seed];
    Observation obs{s.image_id, s.label, {}, 0.0, {}};
    for (const std::size_t j : order) {
      if (used[j]) continue;
      const auto& d = detections[j];
      if (d.image_id != s.image_id || d.label != s.label) continue;
      if (j != seed && iou(s.bbox, d.bbox) < iou_threshold) continue;
      used[j] = true;
      obs.members.push_back(j);
    }
    const double n = static_cast<double>(obs.members.size());
    for (const std::size_t j : obs.members) {
      const auto& d = detections[j];
      obs.bbox.x += d.bbox.x / n;
      obs.bbox.y += d.bbox.y / n;
      obs.bbox.w += d.bbox.w / n;
      obs.bbox.h += d.bbox.h / n;
      obs.score += d.score / n;
    }
    groups.push_back(std::move(obs));
  }
  return groups;
}

ApReport average_precision(const std::vector<DetectionRecord>& detections,
                           const std::vector<GroundTruth>& ground_truths,
                           double iou_threshold) {
  ApReport report;
  std::set<long long> gt_classes, det_classes;
  for (const auto& g : ground_truths) gt_classes.insert(g.label);
  for (const auto& d : detections) det_classes.insert(d.label);
  for (const long long c : det_classes) {
    if (!gt_classes.count(c)) report.skipped_classes.push_back(c);
  }
  for (const long long c : gt_classes) {
    std::vector<DetectionRecord> dets;
    std::vector<GroundTruth> gts;
    for (const auto& d : detections) {
      if (d.label == c) dets.push_back(d);
    }
    for (const auto& g : ground_truths) {
      if (g.label == c) gts.push_back(g);
    }
    const auto order = order_by_score(dets);
    const auto matched = greedy_match(dets, order, gts, iou_threshold, true);
    std::vector<double> recall, precision;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (matched[order[k]]) ++tp;
      recall.push_back(static_cast<double>(tp) / static_cast<double>(gts.size()));
      precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
    }
    // Precision envelope, then area under the step curve.
    for (std::size_t k = precision.size(); k-- > 1;) {
      precision[k - 1] = std::max(precision[k - 1], precision[k]);
    }
    double ap = 0.0, prev_recall = 0.0;
    for (std::size_t k = 0; k < recall.size(); ++k) {
      ap += (recall[k] - prev_recall) * precision[k];
      prev_recall = recall[k];
    }
    report.per_class[c] = ap;
  }
  if (!report.per_class.empty()) {
    double sum = 0.0;
    for (const auto& [c, ap] : report.per_class) sum += ap;
    report.mean = sum / static_cast<double>(report.per_class.size());
  }
  return report;
}

double average_recall_at_k(const std::vector<DetectionRecord>& proposals,
                           const std::vector<GroundTruth>& ground_truths,
                           std::size_t k) {
  if (k == 0) throw ParameterError("k must be >= 1");
  if (ground_truths.empty()) return 0.0;
  // Top-k per image.
  std::vector<DetectionRecord> kept;
  std::map<long long, std::size_t> per_image;
  for (const std::size_t i : order_by_score(proposals)) {
    if (per_image[proposals[i].image_id]++ < k) kept.push_back(proposals[i]);
  }
  const auto order = order_by_score(kept);
  double total = 0.0;
  for (const double threshold : kRecallIouThresholds) {
    const auto matched = greedy_match(kept, order, ground_truths, threshold, false);
    const auto hits = std::count(matched.begin(), matched.end(), true);
    total += static_cast<double>(hits) / static_cast<double>(ground_truths.size());
  }
  return total / static_cast<double>(kRecallIouThresholds.size());
}

namespace {

void require_sets(const std::vector<double>& correct,
                  const std::vector<double>& incorrect) {
  if (correct.empty() || incorrect.empty()) {
    throw InputError("uncertainty error needs non-empty correct and incorrect sets");
  }
}

}  // namespace

double uncertainty_error(const std::vector<double>& correct,
                         const std::vector<double>& incorrect, double delta) {
  require_sets(correct, incorrect);
  const auto rejected = std::count_if(correct.begin(), correct.end(),
                                      [&](double u) { return u > delta; });
  const auto accepted = std::count_if(incorrect.begin(), incorrect.end(),
                                      [&](double u) { return u <= delta; });
  return 0.5 * static_cast<double>(rejected) / static_cast<double>(correct.size()) +
         0.5 * static_cast<double>(accepted) / static_cast<double>(incorrect.size());
}

MinUncertaintyError min_uncertainty_error(const std::vector<double>& correct,
                                          const std::vector<double>& incorrect) {
  require_sets(correct, incorrect);
  std::vector<double> values(correct);
  values.insert(values.end(), incorrect.begin(), incorrect.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> candidates{values.front() - 1.0};
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    candidates.push_back(0.5 * (values[i] + values[i + 1]));
  }
  candidates.push_back(values.back() + 1.0);
  MinUncertaintyError best{2.0, 0.0};
  for (const double delta : candidates) {
    const double ue = uncertainty_error(correct, incorrect, delta);
    if (ue < best.mue) best = {ue, delta};
  }
  return best;
}

UncertaintyReport aggregate_mcmue(
    const std::map<long long, ClassUncertainty>& per_class) {
  UncertaintyReport report;
  double sum = 0.0;
  for (const auto& [c, sets] : per_class) {
    if (sets.correct.empty() || sets.incorrect.empty()) continue;
    const auto m = min_uncertainty_error(sets.correct, sets.incorrect);
    report.cmue[c] = m.mue;
    report.delta[c] = m.delta;
    sum += m.mue;
  }
  if (report.cmue.empty()) {
    throw InputError("no class has both correct and incorrect detections");
  }
  report.mcmue = sum / static_cast<double>(report.cmue.size());
  return report;
}

std::map<long long, ClassUncertainty> split_by_correctness(
    const std::vector<DetectionRecord>& detections,
    const std::vector<GroundTruth>& ground_truths, double iou_threshold) {
  const auto order = order_by_score(detections);
  const auto matched =
      greedy_match(detections, order, ground_truths, iou_threshold, true);
  std::map<long long, ClassUncertainty> out;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    if (!d.uncertainty) continue;
    auto& sets = out[d.label];
    (matched[i] ? sets.correct : sets.incorrect).push_back(*d.uncertainty);
  }
  return out;
}

}  // namespace fshnn
