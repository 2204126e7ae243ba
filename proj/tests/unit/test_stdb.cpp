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
#include <functional>
#include <vector>

#include "doctest.h"
#include "fshnn/coding/coding.hpp"
#include "fshnn/numerics/kernels.hpp"
#include "fshnn/numerics/rng.hpp"
#include "fshnn/spiking/simulate.hpp"
#include "fshnn/stdb/stdb.hpp"

using namespace fshnn;

TEST_CASE("cross-entropy on the accumulated potential") {
  const auto two = spike_cross_entropy_loss(TensorD::vector({0.0, 0.0}),
                                            TensorD::vector({1.0, 0.0}));
  CHECK(two.loss == doctest::Approx(std::log(2.0)));
  const auto three = spike_cross_entropy_loss(TensorD::vector({1.0, 2.0, 3.0}),
                                              TensorD::vector({0.0, 0.0, 1.0}));
  CHECK(three.loss == doctest::Approx(0.40761).epsilon(1e-4));
  // Far-off logits keep the loss finite.
  const auto far = spike_cross_entropy_loss(TensorD::vector({0.0, 2000.0}),
                                            TensorD::vector({1.0, 0.0}));
  CHECK(far.loss == doctest::Approx(2000.0));
  CHECK_THROWS_AS(spike_cross_entropy_loss(TensorD::vector({0.0, 0.0}),
                                           TensorD::vector({0.5, 0.5})),
                  InputError);
}

TEST_CASE("output gradient is p - y exactly") {
  const Tensor p = Tensor::vector({0.5f, 0.5f});
  const auto g = output_potential_grad(p, Tensor::vector({1.0f, 0.0f}));
  CHECK(g[0] == -0.5);
  CHECK(g[1] == 0.5);

  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor u({5});
    for (auto& v : u.data()) v = static_cast<float>(rng.normal(0.0, 3.0));
    const Tensor probs = softmax(u);
    const Tensor y = one_hot(rng.uniform_int(5), 5);
    const auto grad = output_potential_grad(probs, y);
    for (std::size_t i = 0; i < 5; ++i) {
      REQUIRE(grad[i] == static_cast<double>(probs[i]) - y[i]);
    }
  }
}

TEST_CASE("p - y matches finite differences of the loss") {
  const TensorD u = TensorD::vector({0.3, -1.2, 2.1, 0.4});
  const TensorD y = TensorD::vector({0.0, 1.0, 0.0, 0.0});
  const std::function<double(const TensorD&)> loss = [&](const TensorD& v) {
    return spike_cross_entropy_loss(v, y).loss;
  };
  const auto fd = finite_difference_gradient(loss, u, 1e-5);
  const auto p = softmax(u);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(fd[i] - (p[i] - y[i])) < 1e-5);
  }
}

TEST_CASE("surrogate derivative") {
  const SurrogateParams params;
  CHECK(surrogate_spike_grad(5, 5, params) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(std::abs(surrogate_spike_grad(150, 50, params) - 0.110364) < 1e-6);
  // Never fired: time since the window start.
  CHECK(surrogate_spike_grad(100, kNeverSpiked, params) ==
        doctest::Approx(0.3 * std::exp(-1.0)));
  // Clamped to the window.
  CHECK(surrogate_spike_grad(500, 0, params, 100) ==
        doctest::Approx(0.3 * std::exp(-1.0)));
}

TEST_CASE("output-only network gradient matches finite differences") {
  // Binary inputs and dyadic weights keep the float potentials exact.
  NetworkSpec net;
  net.input_shape = {4};
  net.layers.push_back(LayerSpec::fc(3).with_tag(LearningTag::kBackprop));
  net.allocate_parameters();
  net.layers[0].weights =
      Tensor({3, 4}, {0.25f, -0.5f, 0.125f, 0.75f, -0.25f, 0.5f, 0.375f, 0.0f,
                      0.0625f, 0.25f, -0.75f, 0.5f});
  const std::size_t steps = 5;
  SpikeTrain input({4}, steps);
  Rng rng(12);
  for (std::size_t t = 0; t < steps; ++t) {
    for (auto& v : input.frame(t).data()) v = rng.bernoulli(0.5) ? 1.0f : 0.0f;
  }
  const Tensor target = one_hot(2, 3);
  const TensorD target_d = TensorD::cast_from(target);

  SimulationOptions options;
  options.record_tape = true;
  const auto sim = forward_simulate(net, input, {}, options);
  const auto ce = spike_cross_entropy_loss(sim.output_potential, target);
  const auto grads = stdb_backward(*sim.tape, output_potential_grad(
                                                  ce.probabilities, target),
                                   net, SurrogateParams{});
  REQUIRE(grads.weights[0].shape() == Shape{3, 4});

  const float h = 1.0f / 4096.0f;
  for (std::size_t k = 0; k < 12; ++k) {
    auto loss_at = [&](float offset) {
      NetworkSpec probe = net;
      probe.layers[0].weights[k] += offset;
      const auto u = forward_simulate(probe, input).output_potential;
      return spike_cross_entropy_loss(TensorD::cast_from(u), target_d).loss;
    };
    const double fd = (loss_at(h) - loss_at(-h)) / (2.0 * h);
    const double analytic = grads.weights[0][k];
    CAPTURE(k);
    CHECK(std::abs(fd - analytic) <= 1e-5 * std::max(1.0, std::abs(analytic)));
  }
}

TEST_CASE("hidden surrogate path on one neuron over three steps") {
  NetworkSpec net;
  net.input_shape = {1};
  const LifParams lif;  // tau 10, R 1, dt 1: gain 0.1
  net.layers.push_back(
      LayerSpec::fc(1).with_lif(lif).with_tag(LearningTag::kBackprop));
  net.layers.push_back(LayerSpec::fc(2).with_tag(LearningTag::kBackprop));
  net.allocate_parameters();
  net.layers[0].weights = Tensor({1, 1}, {4.0f});
  net.layers[1].weights = Tensor({2, 1}, {0.7f, -0.4f});

  SpikeTrain input({1}, 3);
  input.set_frame(0, Tensor::vector({1.5f}));
  input.set_frame(1, Tensor::vector({0.3f}));
  input.set_frame(2, Tensor::vector({2.0f}));
  // v: 0.6, 0.66, 1.394 -> the neuron fires at t = 2 only.
  SimulationOptions options;
  options.record_tape = true;
  const auto sim = forward_simulate(net, input, {}, options);
  REQUIRE(sim.layer_records[0].frame(0)[0] == 0.0f);
  REQUIRE(sim.layer_records[0].frame(1)[0] == 0.0f);
  REQUIRE(sim.layer_records[0].frame(2)[0] == 1.0f);

  const SurrogateParams sp;
  const Tensor target = one_hot(0, 2);
  const auto ce = spike_cross_entropy_loss(sim.output_potential, target);
  const TensorD g = output_potential_grad(ce.probabilities, target);
  const auto grads = stdb_backward(*sim.tape, g, net, sp);

  // dL/do^t = 0.7 g0 - 0.4 g1 at every step.
  const double dl_do = 0.7 * g[0] - 0.4 * g[1];
  // t=0: never fired, dt = 0; t=1: never fired, dt = 1; t=2: fired now.
  const double s0 = 0.3, s1 = 0.3 * std::exp(-0.01), s2 = 0.3;
  const double hand = dl_do * 0.1 * s0 * 1.5 + dl_do * 0.1 * s1 * 0.3f +
                      dl_do * 0.1 * s2 * 2.0;
  CHECK(std::abs(grads.weights[0][0] - hand) < 1e-9);
  CHECK(std::abs(grads.weights[1][0] - g[0]) < 1e-9);
  CHECK(std::abs(grads.weights[1][1] - g[1]) < 1e-9);
}

TEST_CASE("SGD with momentum and weight decay") {
  OptimizerParams params;
  params.learning_rate = 0.1;
  params.momentum = 0.95;
  params.weight_decay = 0.0005;
  const auto [w, v] = sgd_momentum_update(1.0, 0.5, 0.0, params);
  CHECK(v == doctest::Approx(0.5005).epsilon(1e-12));
  CHECK(w == doctest::Approx(0.94995).epsilon(1e-12));

  Tensor weights = Tensor::vector({1.0f});
  TensorD velocity;
  sgd_momentum_step(weights, TensorD::vector({0.5}), velocity, params);
  CHECK(weights[0] == doctest::Approx(0.94995));
  CHECK(velocity[0] == doctest::Approx(0.5005));
  params.batch_size = 0;
  CHECK_THROWS_AS(params.validate(), ParameterError);
}

TEST_CASE("focal loss") {
  CHECK(std::abs(focal_loss(0.5, 2.0) - 0.173287) < 1e-6);
  for (double p : {0.1, 0.5, 0.9, 1.0}) {
    CHECK(focal_loss(p, 0.0) == -std::log(p));
  }
  CHECK_THROWS_AS(focal_loss(0.0, 2.0), NumericError);
  CHECK_THROWS_AS(focal_loss(0.5, -1.0), ParameterError);

  // gamma = 0 gives the cross-entropy gradient p - y.
  const Tensor p = softmax(Tensor::vector({0.2f, 1.0f, -0.5f}));
  const auto g0 = focal_loss_potential_grad(p, 1, 0.0);
  const auto ce = output_potential_grad(p, one_hot(1, 3));
  for (std::size_t i = 0; i < 3; ++i) CHECK(g0[i] == doctest::Approx(ce[i]));

  // gamma = 2 against finite differences through softmax.
  const TensorD u = TensorD::vector({0.2, 1.0, -0.5});
  const std::function<double(const TensorD&)> fl = [](const TensorD& v) {
    return focal_loss(softmax(v)[1], 2.0);
  };
  const auto fd = finite_difference_gradient(fl, u, 1e-6);
  const auto g2 = focal_loss_potential_grad(softmax(Tensor::vector({0.2f, 1.0f, -0.5f})), 1, 2.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(g2[i] == doctest::Approx(fd[i]).epsilon(1e-4));
  CHECK_THROWS_AS(focal_loss_potential_grad(p, 3, 2.0), InputError);
}

TEST_CASE("training separates two rate patterns") {
  NetworkSpec net;
  net.input_shape = {4};
  net.layers.push_back(
      LayerSpec::fc(6).with_lif(LifParams{}).with_tag(LearningTag::kBackprop));
  net.layers.push_back(LayerSpec::fc(2).with_tag(LearningTag::kBackprop));
  Rng rng(21);
  net.initialize_parameters(rng, 1.0);
  // Positive hidden weights so every unit fires on some pattern.
  for (auto& w : net.layers[0].weights.data()) {
    w = static_cast<float>(1.5 * rng.uniform());
  }
  for (auto& w : net.layers[1].weights.data()) w *= 0.05f;

  std::vector<Tensor> images;
  std::vector<std::size_t> labels;
  for (int i = 0; i < 20; ++i) {
    images.push_back(i % 2 ? Tensor::vector({1, 1, 0, 0})
                           : Tensor::vector({0, 0, 1, 1}));
    labels.push_back(static_cast<std::size_t>(i % 2));
  }
  StdbTrainingParams params;
  params.encoder.steps = 30;
  params.optimizer.learning_rate = 1e-3;
  params.optimizer.batch_size = 4;
  params.epochs = 40;
  const auto report = train_stdb(net, images, labels, params, rng);
  REQUIRE_FALSE(report.epochs.empty());
  CHECK(report.epochs.back().accuracy == 1.0);
  CHECK(report.epochs.back().loss < report.epochs.front().loss);

  const auto eval = evaluate_classification(net, images, labels,
                                            params.encoder, rng);
  CHECK(eval.accuracy >= 0.95);
}

TEST_CASE("training rejects mismatched inputs") {
  NetworkSpec net;
  net.input_shape = {2};
  net.layers.push_back(LayerSpec::fc(2).with_tag(LearningTag::kBackprop));
  net.allocate_parameters();
  Rng rng(1);
  CHECK_THROWS_AS(train_stdb(net, {Tensor::vector({1, 0})}, {0, 1},
                             StdbTrainingParams{}, rng),
                  InputError);
}
