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

// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "experiments.hpp"
#include "fshnn/coding/coding.hpp"
#include "fshnn/conversion/conversion.hpp"
#include "fshnn/energy/energy.hpp"
#include "fshnn/evaluation/evaluation.hpp"
#include "fshnn/io/checkpoint.hpp"
#include "fshnn/io/config.hpp"
#include "fshnn/io/idx.hpp"
#include "fshnn/numerics/kernels.hpp"
#include "fshnn/spiking/simulate.hpp"
#include "fshnn/stdb/stdb.hpp"
#include "fshnn/stdp/stdp.hpp"
#include "fshnn/tailindex/tailindex.hpp"
#include "json.hpp"

namespace {

using namespace fshnn;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---- 1 ---------------------------------------------------------------------

Verdict tail_index_oracle() {
  Verdict v;
  const auto start = Clock::now();
  for (double alpha : {1.2, 1.5, 1.8, 2.0}) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng rng(seed, 6);
      const auto x = sample_alpha_stable(alpha, 1.0, 40000, rng);
      sum += estimate_tail_index(x).alpha_hat;
    }
    const double mean = sum / 10.0;
    v.note("alpha " + fmt(alpha, 2) + " -> " + fmt(mean, 4));
    v.require(std::abs(mean - alpha) <= 0.05, "alpha " + fmt(alpha, 2) + " within 0.05");
  }
  const double elapsed = seconds_since(start);
  v.note(fmt(elapsed, 3) + " s");
  v.require(elapsed < 10.0, "runtime < 10 s");
  return v;
}

// ---- 2 ---------------------------------------------------------------------

Verdict tail_index_direction() {
  Verdict v;
  const auto start = Clock::now();
  const auto config = default_experiment_config();
  double stdp_sum = 0.0, sgd_sum = 0.0;
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double a_stdp = tools::stdp_noise_run(config, 256, 32, 4, seed).estimate.alpha_hat;
    const double a_sgd = tools::sgd_noise_run(config, 256, 32, 4, 64, seed).estimate.alpha_hat;
    stdp_sum += a_stdp;
    sgd_sum += a_sgd;
    wins += a_stdp < a_sgd ? 1 : 0;
  }
  v.note("mean alpha STDP " + fmt(stdp_sum / 10, 4) + " vs SGD " + fmt(sgd_sum / 10, 4));
  v.note("per-seed STDP < SGD at " + std::to_string(wins) + "/10 seeds");
  v.require(stdp_sum < sgd_sum, "mean alpha STDP < mean alpha SGD");
  const double elapsed = seconds_since(start);
  v.note(fmt(elapsed, 3) + " s");
  v.require(elapsed < 300.0, "runtime < 5 min");
  return v;
}

// ---- 3 ---------------------------------------------------------------------

Verdict stdb_gradients() {
  Verdict v;
  // Output gradient is p - y exactly.
  Rng rng(8);
  bool exact = true;
  for (int trial = 0; trial < 50; ++trial) {
    Tensor u({4});
    for (auto& x : u.data()) x = static_cast<float>(rng.normal(0.0, 3.0));
    const Tensor p = softmax(u);
    const Tensor y = one_hot(rng.uniform_int(4), 4);
    const auto g = output_potential_grad(p, y);
    for (std::size_t i = 0; i < 4; ++i) {
      exact = exact && g[i] == static_cast<double>(p[i]) - static_cast<double>(y[i]);
    }
  }
  v.require(exact, "output gradient == p - y");

  // No hidden spiking: end-to-end finite differences.
  NetworkSpec net;
  net.input_shape = {4};
  net.layers.push_back(LayerSpec::fc(3).with_tag(LearningTag::kBackprop));
  net.allocate_parameters();
  net.layers[0].weights = Tensor({3, 4}, {0.25f, -0.5f, 0.125f, 0.75f, -0.25f, 0.5f,
                                          0.375f, 0.0f, 0.0625f, 0.25f, -0.75f, 0.5f});
  SpikeTrain input({4}, 5);
  for (std::size_t t = 0; t < 5; ++t) {
    for (auto& x : input.frame(t).data()) x = rng.bernoulli(0.5) ? 1.0f : 0.0f;
  }
  const Tensor target = one_hot(2, 3);
  SimulationOptions options;
  options.record_tape = true;
  const auto sim = forward_simulate(net, input, {}, options);
  const auto ce = spike_cross_entropy_loss(sim.output_potential, target);
  const auto grads = stdb_backward(*sim.tape, output_potential_grad(ce.probabilities, target),
                                   net, SurrogateParams{});
  double worst = 0.0;
  const float h = 1.0f / 4096.0f;
  for (std::size_t k = 0; k < 12; ++k) {
    auto loss_at = [&](float offset) {
      NetworkSpec probe = net;
      probe.layers[0].weights[k] += offset;
      const auto u = forward_simulate(probe, input).output_potential;
      return spike_cross_entropy_loss(TensorD::cast_from(u), TensorD::cast_from(target)).loss;
    };
    const double fd = (loss_at(h) - loss_at(-h)) / (2.0 * h);
    const double g = grads.weights[0][k];
    worst = std::max(worst, std::abs(fd - g) / std::max(1.0, std::abs(g)));
  }
  v.note("finite-difference rel err " + fmt(worst, 3));
  v.require(worst <= 1e-5, "finite differences within 1e-5");

  // One hidden neuron, T = 3, expanded by hand.
  NetworkSpec hidden;
  hidden.input_shape = {1};
  hidden.layers.push_back(LayerSpec::fc(1).with_lif(LifParams{}).with_tag(LearningTag::kBackprop));
  hidden.layers.push_back(LayerSpec::fc(2).with_tag(LearningTag::kBackprop));
  hidden.allocate_parameters();
  hidden.layers[0].weights = Tensor({1, 1}, {4.0f});
  hidden.layers[1].weights = Tensor({2, 1}, {0.7f, -0.4f});
  SpikeTrain x3({1}, 3);
  x3.set_frame(0, Tensor::vector({1.5f}));
  x3.set_frame(1, Tensor::vector({0.3f}));
  x3.set_frame(2, Tensor::vector({2.0f}));
  const auto hs = forward_simulate(hidden, x3, {}, options);
  const Tensor y0 = one_hot(0, 2);
  const auto hce = spike_cross_entropy_loss(hs.output_potential, y0);
  const TensorD og = output_potential_grad(hce.probabilities, y0);
  const auto hg = stdb_backward(*hs.tape, og, hidden, SurrogateParams{});
  const double dl_do = 0.7 * og[0] - 0.4 * og[1];
  // v = 0.6, 0.66, 1.394: spike at t = 2; surrogate 0.3, 0.3 e^-0.01, 0.3.
  const double hand = dl_do * 0.1 * (0.3 * 1.5 + 0.3 * std::exp(-0.01) * 0.3f + 0.3 * 2.0);
  const double err = std::abs(hg.weights[0][0] - hand);
  v.note("hand chain-rule err " + fmt(err, 3));
  v.require(err <= 1e-9, "hidden chain rule within 1e-9");
  return v;
}

// ---- 4 ---------------------------------------------------------------------

Verdict surrogate_values() {
  Verdict v;
  const SurrogateParams p;
  const double at0 = surrogate_spike_grad(10, 10, p);
  const double at100 = surrogate_spike_grad(110, 10, p);
  v.note("dt=0 -> " + fmt(at0, 8) + ", dt=100 -> " + fmt(at100, 8));
  v.require(std::abs(at0 - 0.3) <= 1e-6, "0.3 at dt=0");
  v.require(std::abs(at100 - 0.110364) <= 1e-6, "0.110364 at dt=100");
  return v;
}

// ---- 5 ---------------------------------------------------------------------

Verdict lif_dynamics() {
  Verdict v;
  const LifParams params;
  // Sub-threshold convergence to R*I.
  LifState s = LifState::resting({1}, params);
  bool silent = true;
  for (int t = 0; t < 500; ++t) {
    silent = silent && lif_step(s, Tensor::vector({0.8f}), params)[0] == 0.0f;
  }
  v.require(silent && std::abs(s.v[0] - 0.8) < 1e-4, "sub-threshold converges to R*I");

  // First spike within +2 steps of the closed form at I = 2.
  LifState f = LifState::resting({1}, params);
  int first = 0;
  for (int t = 1; t <= 100 && first == 0; ++t) {
    if (lif_step(f, Tensor::vector({2.0f}), params)[0] == 1.0f) first = t;
  }
  const double closed = params.tau_m * std::log(2.0 / 1.0);
  v.note("first spike step " + std::to_string(first) + " vs closed form " + fmt(closed, 4));
  v.require(first >= closed && first <= closed + 2.0, "first spike within +2 steps");

  // No post-step potential above threshold.
  Rng rng(17);
  LifState many = LifState::resting({256}, params);
  Tensor current({256});
  bool bounded = true;
  for (int t = 0; t < 500; ++t) {
    for (auto& c : current.data()) c = static_cast<float>(rng.uniform() * 8.0 - 1.0);
    lif_step(many, current, params);
    for (auto x : many.v.data()) bounded = bounded && x <= params.v_threshold;
  }
  v.require(bounded, "no potential above threshold after a step");
  return v;
}

// ---- 6 ---------------------------------------------------------------------

Verdict stdp_algebra() {
  Verdict v;
  const StdpParams p;
  v.require(stdp_delta(0.0, 1, 2, p) == 0.0 && stdp_delta(1.0, 1, 2, p) == 0.0 &&
                stdp_delta(0.0, 3, 2, p) == 0.0 && stdp_delta(1.0, 3, 2, p) == 0.0,
            "zero update at both bounds");
  const double ltp = stdp_delta(0.5, 1, 2, p);
  v.note("LTP at 0.5 -> " + fmt(ltp, 8));
  v.require(std::abs(ltp - 0.001) < 1e-15, "LTP 0.001 at w = 0.5");
  Rng rng(6);
  Tensor w({500});
  for (auto& x : w.data()) x = static_cast<float>(rng.uniform());
  bool inside = true;
  for (int round = 0; round < 200; ++round) {
    Tensor d(w.shape());
    for (std::size_t i = 0; i < w.size(); ++i) {
      d[i] = static_cast<float>(100.0 * stdp_delta(w[i], static_cast<int>(rng.uniform_int(5)),
                                                   2, p) + rng.normal(0.0, 0.2));
    }
    apply_weight_update(w, d, p);
    for (auto x : w.data()) inside = inside && x >= 0.0f && x <= 1.0f;
  }
  v.require(inside, "weights stay in [0,1]");
  return v;
}

// ---- 7 ---------------------------------------------------------------------

// Relative error of the decoded rate of hidden unit `unit` against the analog
// activation, averaged over log-spaced inputs.
double small_channel_rate_error(const AnnCheckpoint& ann, const CalibrationStats& stats,
                                NormalizationMode mode, std::size_t unit) {
  const auto snn = convert_ann_to_snn(ann, stats, mode);
  const double scale = mode == NormalizationMode::kLayer ? stats.layer_max[0]
                                                         : stats.channel_max[0][unit];
  const std::size_t steps = 350;
  double total = 0.0;
  const int points = 21;
  for (int k = 0; k < points; ++k) {
    const float x = static_cast<float>(std::pow(10.0, -2.0 + 2.0 * k / (points - 1)));
    const double analog = ann_forward(ann, Tensor::vector({x})).activations[0][unit];
    const auto sim = forward_simulate(snn, constant_current_encode(Tensor::vector({x}), steps));
    const double rate = sim.layer_records[0].counts()[unit] / static_cast<double>(steps);
    total += std::abs(rate * scale - analog) / analog;
  }
  return total / points;
}

Verdict conversion_fidelity() {
  Verdict v;
  const auto start = Clock::now();
  Rng rng(7);
  auto sample = [&](std::vector<Tensor>& xs, std::vector<std::size_t>& ys, std::size_t n) {
    while (xs.size() < n) {
      const float a = static_cast<float>(rng.uniform());
      const float b = static_cast<float>(rng.uniform());
      if (std::abs(a - b) < 0.15f) continue;  // margin keeps the classes separable
      xs.push_back(Tensor::vector({a, b}));
      ys.push_back(a > b ? 1 : 0);
    }
  };
  std::vector<Tensor> train_x, test_x;
  std::vector<std::size_t> train_y, test_y;
  sample(train_x, train_y, 100);
  sample(test_x, test_y, 200);

  AnnCheckpoint ann;
  ann.input_shape = {2};
  ann.layers.push_back(LayerSpec::fc(16).with_activation(Activation::kRelu).with_bias());
  ann.layers.push_back(LayerSpec::fc(2).with_bias());
  ann.initialize_parameters(rng);
  AnnTrainingParams tp;
  tp.epochs = 1000;
  const double train_acc = train_ann_classifier(ann, train_x, train_y, tp, rng);
  v.note("ANN train accuracy " + fmt(train_acc, 4));
  v.require(train_acc == 1.0, "ANN at 100% on the toy set");

  const auto stats = collect_calibration_stats(ann, train_x);
  EncoderParams encoder;
  encoder.steps = 350;
  for (auto mode : {NormalizationMode::kLayer, NormalizationMode::kChannel}) {
    const auto snn = convert_ann_to_snn(ann, stats, mode);
    std::size_t agree = 0;
    for (const auto& x : test_x) {
      const auto sim = forward_simulate(snn, poisson_encode(x, encoder, rng));
      agree += argmax(sim.output_potential) == ann_predict(ann, x) ? 1 : 0;
    }
    const double rate = agree / 200.0;
    const std::string name = mode == NormalizationMode::kLayer ? "layer" : "channel";
    v.note(name + "-norm agreement " + fmt(rate, 4));
    v.require(rate >= 0.95, name + "-norm agreement >= 95%");
  }

  // Stress: hidden maxima {0.1, 1.0}.
  AnnCheckpoint stress;
  stress.input_shape = {1};
  stress.layers.push_back(LayerSpec::fc(2).with_activation(Activation::kRelu));
  stress.layers.push_back(LayerSpec::fc(1));
  stress.allocate_parameters();
  stress.layers[0].weights = Tensor({2, 1}, {0.1f, 1.0f});
  stress.layers[1].weights = Tensor({1, 2}, {1.0f, 1.0f});
  const auto sstats = collect_calibration_stats(stress, {Tensor::vector({1.0f})});
  const double err_channel = small_channel_rate_error(stress, sstats, NormalizationMode::kChannel, 0);
  const double err_layer = small_channel_rate_error(stress, sstats, NormalizationMode::kLayer, 0);
  v.note("small-channel rate error channel " + fmt(err_channel, 3) + " vs layer " +
         fmt(err_layer, 3));
  v.require(err_channel <= 0.05, "channel-norm error <= 5%");
  v.require(err_layer > 0.20, "layer-norm error > 20%");
  const double elapsed = seconds_since(start);
  v.note(fmt(elapsed, 3) + " s");
  v.require(elapsed < 180.0, "runtime < 3 min");
  return v;
}

// ---- 8 ---------------------------------------------------------------------

Verdict metrics() {
  Verdict v;
  Rng rng(2024);
  int exact = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto draw = [&] {
      std::vector<double> s(1 + rng.uniform_int(8));
      for (auto& x : s) x = static_cast<double>(rng.uniform_int(101)) / 100.0;
      return s;
    };
    const auto c = draw();
    const auto i = draw();
    double grid = 2.0;
    bool ue_match = true;
    for (int k = 0; k < 1000; ++k) {
      const double delta = 0.0012 * k - 0.0994;
      double rej = 0, acc = 0;
      for (double u : c) rej += u > delta;
      for (double u : i) acc += u <= delta;
      const double ue = 0.5 * rej / c.size() + 0.5 * acc / i.size();
      ue_match = ue_match && ue == uncertainty_error(c, i, delta);
      grid = std::min(grid, ue);
    }
    exact += (ue_match && min_uncertainty_error(c, i).mue == grid) ? 1 : 0;
  }
  v.note("UE/MUE match the dense grid on " + std::to_string(exact) + "/20");
  v.require(exact == 20, "UE/MUE oracle on 20 instances");

  const GroundTruth gt{1, {0, 0, 10, 10}, 1};
  const std::vector<DetectionRecord> dets = {{1, {0, 0, 10, 7}, 0.9, 1, {}},
                                             {1, {0, 0, 10, 3}, 0.8, 1, {}}};
  const double ap = average_precision(dets, {gt}).mean;
  v.require(ap == 1.0, "hand AP = 1.0");
  const double ar_exact = average_recall_at_k({{1, gt.bbox, 0.9, 1, {}}}, {gt}, 100);
  const double ar_75 = average_recall_at_k({{1, {0, 0, 10, 7.5}, 0.9, 1, {}}}, {gt}, 100);
  v.note("AP " + fmt(ap) + ", AR@100 " + fmt(ar_exact) + " / " + fmt(ar_75));
  v.require(ar_exact == 1.0, "AR@100 exact match = 1");
  v.require(std::abs(ar_75 - 0.6) < 1e-12, "AR@100 at IoU 0.75 = 0.6");
  v.require(min_uncertainty_error({0.1, 0.2}, {0.7, 0.9}).mue == 0.0, "separated MUE = 0");
  v.require(min_uncertainty_error({0.2, 0.5}, {0.2, 0.5}).mue == 0.5, "identical MUE = 0.5");
  return v;
}

// ---- 9 ---------------------------------------------------------------------

Verdict focal() {
  Verdict v;
  bool same = true;
  for (double p : {0.05, 0.3, 0.5, 0.99}) same = same && focal_loss(p, 0.0) == -std::log(p);
  const TensorD u = TensorD::vector({0.4, -1.0, 2.0});
  const auto ce = spike_cross_entropy_loss(u, TensorD::vector({0, 0, 1}));
  same = same && std::abs(focal_loss(ce.probabilities[2], 0.0) - ce.loss) < 1e-12;
  v.require(same, "gamma = 0 equals cross-entropy");
  const double fl = focal_loss(0.5, 2.0);
  v.note("FL(0.5, 2) = " + fmt(fl, 8));
  v.require(std::abs(fl - 0.173287) <= 1e-6, "FL(0.5, 2) = 0.173287");
  return v;
}

// ---- 10 --------------------------------------------------------------------

Verdict energy_formula(const std::filesystem::path& dir) {
  Verdict v;
  OpCount mac, ac;
  mac.total = 131410000000ULL;
  ac.total = 91000000ULL;
  const double e_ann = inference_energy(mac, EnergyConstants{}, EnergyMode::kAnn);
  const double e_snn = inference_energy(ac, EnergyConstants{}, EnergyMode::kSnn, 300);
  const double ratio = efficiency_ratio(e_ann, e_snn);
  v.note("E_ANN " + fmt(e_ann, 5) + " J, E_SNN " + fmt(e_snn, 5) + " J, ratio " + fmt(ratio, 4));
  v.require(std::abs(e_ann - 0.6045) < 5e-5, "0.6045 J");
  v.require(std::abs(e_snn - 0.02457) < 5e-6, "0.02457 J");
  v.require(std::abs(ratio - 24.6) < 0.05, "ratio 24.6");

  std::ostringstream out, err;
  const auto report = dir / "energy.json";
  const int code = tools::run_cli({"fshnn", "energy", "--mac", "131.41e9", "--ac", "9.1e7",
                                   "--timesteps", "300", "--quiet", "--out", report.string()},
                                  out, err);
  v.require(code == 0, "energy command exits 0");
  if (code == 0) {
    std::ifstream in(report);
    const auto j = nlohmann::json::parse(in);
    v.require(std::abs(j["ratio"].get<double>() - ratio) < 1e-9, "report carries the ratio");
    v.require(j["note"].get<std::string>().find("154.88") != std::string::npos,
              "report documents the 154.88 discrepancy");
  }
  return v;
}

// ---- 11 --------------------------------------------------------------------

Verdict poisson_encoder() {
  Verdict v;
  Rng rng(11);
  EncoderParams params;
  params.max_rate = 0.6;
  params.steps = 1000;
  Tensor levels({20});
  for (int i = 0; i < 20; ++i) levels[i] = static_cast<float>(i + 1) / 20.0f;
  const auto counts = poisson_encode(levels, params, rng).counts();
  int inside = 0;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 20; ++i) {
    const double p = levels[i] * params.max_rate;
    const double sigma = std::sqrt(params.steps * p * (1.0 - p));
    inside += std::abs(counts[i] - params.steps * p) <= 3.0 * sigma ? 1 : 0;
    sxy += levels[i] * counts[i] / params.steps;
    sxx += static_cast<double>(levels[i]) * levels[i];
  }
  // Slope of a fit through the origin and its 3-sigma band.
  const double slope = sxy / sxx;
  double var = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double p = levels[i] * params.max_rate;
    var += levels[i] * levels[i] * p * (1 - p) / params.steps;
  }
  const double slope_sigma = std::sqrt(var) / sxx;
  v.note("slope " + fmt(slope, 5) + " (max_rate 0.6, sigma " + fmt(slope_sigma, 3) + "), " +
         std::to_string(inside) + "/20 points within 3 sigma");
  v.require(std::abs(slope - params.max_rate) <= 3.0 * slope_sigma, "slope = max_rate");
  v.require(inside == 20, "every level within 3 sigma");
  return v;
}

// ---- 12 --------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict pipeline(const std::filesystem::path& root) {
  Verdict v;
  const auto start = Clock::now();
  auto run_once = [&](const std::filesystem::path& dir, double& accuracy,
                      std::size_t& epochs) {
    std::filesystem::create_directories(dir);
    const auto p = [&](const char* name) { return (dir / name).string(); };
    std::ostringstream out, err;
    const std::vector<std::vector<std::string>> steps = {
        {"gen-data", "--images", p("images.idx"), "--labels", p("labels.idx"), "--out",
         p("gen.json")},
        {"train-stdp", "--images", p("images.idx"), "--model-out", p("stdp.fsnc"), "--out",
         p("stdp.json")},
        {"train-stdb", "--images", p("images.idx"), "--labels", p("labels.idx"),
         "--model-in", p("stdp.fsnc"), "--model-out", p("stdb.fsnc"), "--out", p("stdb.json")},
        {"eval-class", "--images", p("images.idx"), "--labels", p("labels.idx"), "--model-in",
         p("stdb.fsnc"), "--out", p("eval.json")}};
    for (const auto& s : steps) {
      std::vector<std::string> args = {"fshnn", "--seed", "42", "--quiet"};
      args.insert(args.end(), s.begin(), s.end());
      if (tools::run_cli(args, out, err) != 0) {
        v.require(false, s[0] + " exits 0 (" + err.str() + ")");
        return false;
      }
    }
    std::ifstream ev(dir / "eval.json");
    accuracy = nlohmann::json::parse(ev)["accuracy"].get<double>();
    std::ifstream tr(dir / "stdb.json");
    epochs = nlohmann::json::parse(tr)["epochs"].size();
    return true;
  };
  double acc_a = 0, acc_b = 0;
  std::size_t ep_a = 0, ep_b = 0;
  if (!run_once(root / "a", acc_a, ep_a)) return v;
  const double elapsed = seconds_since(start);
  if (!run_once(root / "b", acc_b, ep_b)) return v;
  v.note("accuracy " + fmt(acc_a, 4) + " after " + std::to_string(ep_a) + " epoch(s), " +
         fmt(elapsed, 3) + " s per run");
  v.require(acc_a >= 0.90, "train accuracy >= 90%");
  v.require(ep_a <= 50, "within 50 epochs");
  v.require(elapsed < 900.0, "run < 15 min");
  bool identical = true;
  for (const char* name : {"gen.json", "stdp.json", "stdb.json", "eval.json",
                           "stdb.fsnc", "images.idx"}) {
    identical = identical && slurp(root / "a" / name) == slurp(root / "b" / name);
  }
  v.require(identical, "reports and checkpoints bitwise identical across runs");
  return v;
}

// ---- 13 --------------------------------------------------------------------

// Uses the network trained by the pipeline criterion; an untrained net has
// near-uniform scores with ~1e-7 variance.
Verdict mc_dropout(const std::filesystem::path& trained) {
  Verdict v;
  const auto config = default_experiment_config();
  const NetworkSpec base = network_from_checkpoint(load_checkpoint(trained / "stdb.fsnc"));
  const auto images = as_single_channel(read_idx_images(trained / "images.idx"));
  // Held-out samples with heavier noise, so some predictions are wrong and
  // mCMUE is defined.
  auto noisy = config;
  noisy.data.noise_sigma = 0.8;
  const auto held_out = tools::pattern_dataset(noisy, 300, 1313);
  const auto& labels = held_out.labels;
  Rng rng(13);

  // Rate 0: every sample equals the deterministic forward pass.
  const NetworkSpec zero = with_mc_dropout(base, 0.0);
  const auto input0 = poisson_encode(images[0], config.encoder, rng);
  const Tensor reference = softmax(forward_simulate(zero, input0).output_potential);
  bool same = true;
  for (const auto& s : mc_dropout_infer(zero, input0, 5, 0.0, rng)) same = same && s == reference;
  v.require(same, "rate 0 reproduces the deterministic forward");

  // Rate 0.2, n = 20, ten inputs per class.
  const NetworkSpec net = with_mc_dropout(base, 0.2);
  std::map<long long, ClassUncertainty> per_class;
  std::map<std::size_t, double> class_variance;
  std::map<std::size_t, int> taken;
  int flat_inputs = 0, correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (taken[labels[i]] == 10) continue;
    ++taken[labels[i]];
    const auto input = poisson_encode(held_out.images[i], config.encoder, rng);
    const auto summary = summarize_samples(mc_dropout_infer(net, input, 20, 0.2, rng));
    double var = 0.0;
    for (auto x : summary.variance.data()) var += x;
    class_variance[labels[i]] += var;
    flat_inputs += var == 0.0 ? 1 : 0;
    const auto predicted = static_cast<long long>(argmax(summary.mean));
    correct += predicted == static_cast<long long>(labels[i]) ? 1 : 0;
    auto& sets = per_class[predicted];
    (predicted == static_cast<long long>(labels[i]) ? sets.correct : sets.incorrect)
        .push_back(summary.entropy);
  }
  std::string variances;
  bool positive = class_variance.size() == 3;
  for (const auto& [c, total] : class_variance) {
    variances += (variances.empty() ? "" : ", ") + std::to_string(c) + ":" + fmt(total / 10, 3);
    positive = positive && total > 0.0;
  }
  v.note("mean score variance per class {" + variances + "}, " + std::to_string(flat_inputs) +
         "/30 inputs with zero variance, " + std::to_string(correct) + "/30 correct");
  v.require(positive, "per-class score variance > 0");
  try {
    const auto report = aggregate_mcmue(per_class);
    v.note("mCMUE from entropies " + fmt(report.mcmue, 4) + " over " +
           std::to_string(report.cmue.size()) + " class(es)");
  } catch (const Error& e) {
    v.require(false, std::string("aggregate_mcmue: ") + e.what());
  }
  return v;
}

// ---- 14 --------------------------------------------------------------------

Verdict ou_simulation() {
  Verdict v;
  OuProcessSpec spec;
  spec.log_density_gradient = [](double theta) { return -theta; };
  spec.learning_rate = 0.1;
  spec.temperature = 1.0;
  spec.dt = 0.01;
  spec.steps = 100000;
  // A single run covers ~100 correlation times (1/b = 10 time units), so
  // its variance estimate scatters by ~15%; average ten seeded runs.
  double var_sum = 0.0, alpha_sum = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const auto path = simulate_ou_sampling(spec, 0.0, rng);
    double mean = 0.0;
    for (double x : path) mean += x;
    mean /= path.size();
    double var = 0.0;
    for (double x : path) var += (x - mean) * (x - mean);
    var /= path.size();
    std::vector<double> inc(path.size() - 1);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) inc[i] = path[i + 1] - path[i];
    var_sum += var;
    alpha_sum += estimate_tail_index(inc).alpha_hat;
    per_seed += (per_seed.empty() ? "" : ",") + fmt(var, 3);
  }
  const double var = var_sum / 10.0, alpha = alpha_sum / 10.0;
  v.note("mean stationary variance " + fmt(var, 4) + " (per seed " + per_seed +
         "), increment alpha " + fmt(alpha, 4));
  v.require(std::abs(var - spec.temperature) <= 0.1 * spec.temperature,
            "variance within 10% of T");
  v.require(std::abs(alpha - 2.0) <= 0.1, "increment alpha within 2 +- 0.1");
  return v;
}

}  // namespace

int main() {
  const auto scratch = std::filesystem::temp_directory_path() / "fshnn_acceptance";
  std::filesystem::remove_all(scratch);
  std::filesystem::create_directories(scratch);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"tail-index oracle", tail_index_oracle},
      {"tail-index direction", tail_index_direction},
      {"STDB gradient exactness", stdb_gradients},
      {"surrogate values", surrogate_values},
      {"LIF dynamics", lif_dynamics},
      {"STDP algebra", stdp_algebra},
      {"conversion fidelity", conversion_fidelity},
      {"metrics", metrics},
      {"focal loss", focal},
      {"energy formula", [&] { return energy_formula(scratch); }},
      {"Poisson encoder", poisson_encoder},
      {"end-to-end pipeline", [&] { return pipeline(scratch / "pipeline"); }},
      {"MC dropout", [&] { return mc_dropout(scratch / "pipeline" / "a"); }},
      {"OU simulation", ou_simulation},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
