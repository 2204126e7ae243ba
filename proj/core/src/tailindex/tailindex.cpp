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

#include "fshnn/tailindex/tailindex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fshnn/error.hpp"
#include "fshnn/spiking/simulate.hpp"

namespace fshnn {

std::vector<double> sample_alpha_stable(double alpha, double sigma,
                                        std::size_t n, Rng& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ParameterError("alpha must lie in (0, 2]");
  }
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  std::vector<double> out(n);
  for (auto& x : out) {
    const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
    if (alpha == 1.0) {
      x = sigma * std::tan(v);
      continue;
    }
    const double w = -std::log(rng.uniform_open());
    x = sigma * std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
        std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
  }
  return out;
}

std::size_t choose_k1(std::size_t K) {
  if (K < 4) throw ParameterError("K must be >= 4 to split into blocks");
  const double root = std::sqrt(static_cast<double>(K));
  std::size_t best = 0;
  for (std::size_t k1 = 2; k1 <= K / 2; ++k1) {
    if (K % k1 != 0) continue;
    if (best == 0 || std::abs(k1 - root) < std::abs(best - root)) best = k1;
    if (static_cast<double>(k1) > root) break;
  }
  if (best == 0) {
    throw ParameterError("K = " + std::to_string(K) +
                         " has no divisor in [2, K/2]");
  }
  return best;
}

TailIndexEstimate estimate_tail_index(std::span<const double> x,
                                      std::size_t K1, std::size_t K2) {
  if (K1 < 2 || K2 < 1) throw ParameterError("need K1 >= 2 and K2 >= 1");
  const std::size_t K = K1 * K2;
  if (x.size() != K) {
    throw ParameterError("sample count " + std::to_string(x.size()) +
                         " != K1*K2 = " + std::to_string(K));
  }
  double sum_log_x = 0.0;
  double sum_log_y = 0.0;
  for (std::size_t i = 0; i < K2; ++i) {
    double y = 0.0;
    for (std::size_t j = 0; j < K1; ++j) {
      const double v = x[i * K1 + j];
      if (v == 0.0 || !std::isfinite(v)) {
        throw ParameterError("tail-index samples must be finite and non-zero");
      }
      y += v;
      sum_log_x += std::log(std::abs(v));
    }
    if (y == 0.0) throw NumericError("block sum is exactly zero");
    sum_log_y += std::log(std::abs(y));
  }
  const double inv_alpha =
      (sum_log_y / static_cast<double>(K2) - sum_log_x / static_cast<double>(K)) /
      std::log(static_cast<double>(K1));
  TailIndexEstimate est;
  est.alpha_hat = 1.0 / inv_alpha;
  est.K = K;
  est.K1 = K1;
  est.K2 = K2;
  est.n_noise_coordinates = K;
  est.out_of_range = !(est.alpha_hat > 0.0 && est.alpha_hat <= 2.0);
  return est;
}

TailIndexEstimate estimate_tail_index(std::span<const double> x) {
  std::vector<double> kept;
  kept.reserve(x.size());
  for (const double v : x) {
    if (v != 0.0) kept.push_back(v);
  }
  const std::size_t n = kept.size();
  if (n < 4) throw ParameterError("fewer than 4 non-zero samples");
  const double root = std::sqrt(static_cast<double>(n));
  std::size_t k1 = 0;
  try {
    k1 = choose_k1(n);
  } catch (const ParameterError&) {
    k1 = 0;
  }
  if (k1 == 0 || static_cast<double>(k1) < root / 2.0) {
    k1 = static_cast<std::size_t>(std::floor(root));
  }
  const std::size_t k2 = n / k1;
  auto est = estimate_tail_index(std::span<const double>(kept.data(), k1 * k2),
                                 k1, k2);
  est.n_noise_coordinates = x.size();
  est.dropped_zeros = x.size() - n;
  return est;
}

std::vector<double> collect_minibatch_noise(std::size_t n, std::size_t batch_size,
                                            std::size_t passes, Rng& rng,
                                            const BatchVectorFn& batch_vector,
                                            const std::vector<double>& reference) {
  if (batch_size == 0 || n == 0 || n % batch_size != 0) {
    throw ParameterError("batch size must divide the data set size");
  }
  if (passes == 0) throw ParameterError("passes must be >= 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> noise;
  const std::size_t batches = n / batch_size;
  for (std::size_t p = 0; p < passes; ++p) {
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::vector<double>> vecs;
    vecs.reserve(batches);
    for (std::size_t b = 0; b < batches; ++b) {
      vecs.push_back(batch_vector(
          std::span<const std::size_t>(order.data() + b * batch_size, batch_size)));
    }
    std::vector<double> center = reference;
    if (center.empty()) {
      center.assign(vecs.front().size(), 0.0);
      for (const auto& v : vecs) {
        for (std::size_t i = 0; i < v.size(); ++i) center[i] += v[i];
      }
      for (auto& c : center) c /= static_cast<double>(batches);
    }
    for (const auto& v : vecs) {
      if (v.size() != center.size()) {
        throw DimensionError("minibatch vectors differ in length");
      }
      for (std::size_t i = 0; i < v.size(); ++i) noise.push_back(v[i] - center[i]);
    }
  }
  return noise;
}

TwoLayerNet init_two_layer(std::size_t d, std::size_t m, double kappa, Rng& rng) {
  if (d < 1 || m < 1) throw ParameterError("two-layer net needs d, m >= 1");
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw ParameterError("kappa must lie in (0, 1]");
  }
  TwoLayerNet net;
  net.d = d;
  net.m = m;
  net.kappa = kappa;
  net.W = TensorD({d, m});
  for (auto& w : net.W.data()) w = kappa * rng.normal();
  net.a.resize(m);
  for (auto& a : net.a) a = rng.bernoulli(0.5) ? 1.0 : -1.0;
  return net;
}

double two_layer_forward(const TwoLayerNet& net, std::span<const double> x) {
  if (x.size() != net.d) throw DimensionError("input length != d");
  double f = 0.0;
  for (std::size_t r = 0; r < net.m; ++r) {
    double z = 0.0;
    for (std::size_t k = 0; k < net.d; ++k) z += net.W.at(k, r) * x[k];
    f += net.a[r] * std::max(z, 0.0);
  }
  return f / std::sqrt(static_cast<double>(net.m));
}

std::vector<double> two_layer_gradient(const TwoLayerNet& net,
                                       const std::vector<std::vector<double>>& xs,
                                       const std::vector<double>& ys,
                                       std::span<const std::size_t> subset) {
  if (xs.size() != ys.size()) throw DimensionError("xs and ys differ in length");
  std::vector<double> grad(net.d * net.m, 0.0);
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(net.m));
  for (const std::size_t i : subset) {
    const auto& x = xs.at(i);
    const double residual = ys[i] - two_layer_forward(net, x);
    for (std::size_t r = 0; r < net.m; ++r) {
      double z = 0.0;
      for (std::size_t k = 0; k < net.d; ++k) z += net.W.at(k, r) * x[k];
      if (z <= 0.0) continue;
      const double coeff = -residual * net.a[r] * inv_sqrt_m;
      for (std::size_t k = 0; k < net.d; ++k) grad[k * net.m + r] += coeff * x[k];
    }
  }
  for (auto& g : grad) g /= static_cast<double>(subset.size());
  return grad;
}

void two_layer_gd_step(TwoLayerNet& net, const std::vector<std::vector<double>>& xs,
                       const std::vector<double>& ys, double lr) {
  std::vector<std::size_t> all(xs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto grad = two_layer_gradient(net, xs, ys, all);
  // two_layer_gradient averages; Phi sums.
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < grad.size(); ++i) net.W[i] -= lr * n * grad[i];
}

std::vector<double> unit_normalize(std::span<const double> x) {
  double norm = 0.0;
  for (const double v : x) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw InputError("cannot normalize an all-zero input");
  std::vector<double> out(x.begin(), x.end());
  for (auto& v : out) v /= norm;
  return out;
}

std::vector<double> collect_sgd_gradient_noise(
    const TwoLayerNet& net, const std::vector<std::vector<double>>& xs,
    const std::vector<double>& ys, std::size_t batch_size, std::size_t passes,
    Rng& rng) {
  std::vector<std::size_t> all(xs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto full = two_layer_gradient(net, xs, ys, all);
  return collect_minibatch_noise(
      xs.size(), batch_size, passes, rng,
      [&](std::span<const std::size_t> batch) {
        return two_layer_gradient(net, xs, ys, batch);
      },
      full);
}

std::vector<double> collect_stdp_update_noise(
    const NetworkSpec& net, std::size_t layer, const std::vector<Tensor>& data,
    std::size_t batch_size, std::size_t passes, const EncoderParams& encoder,
    const StdpParams& params, Rng& rng) {
  params.validate();
  encoder.validate();
  if (layer >= net.layers.size() || !net.layers[layer].is_spiking() ||
      !net.layers[layer].has_weights()) {
    throw ParameterError("STDP noise needs a spiking weighted layer");
  }
  SimulationOptions options;
  options.stop_after_layer = layer;
  return collect_minibatch_noise(
      data.size(), batch_size, passes, rng,
      [&](std::span<const std::size_t> batch) {
        std::vector<double> total(net.layers[layer].weights.size(), 0.0);
        for (const std::size_t i : batch) {
          const SpikeTrain input = poisson_encode(data[i], encoder, rng);
          const auto sim = forward_simulate(net, input, {}, options);
          const SpikeTrain& pre = layer == 0 ? input : sim.layer_records[layer - 1];
          const Tensor delta = stdp_layer_update(
              net.layers[layer], pre, sim.layer_records[layer], params);
          for (std::size_t k = 0; k < total.size(); ++k) total[k] += delta[k];
        }
        return total;
      },
      {});
}

void OuProcessSpec::validate() const {
  if (!log_density_gradient) throw ParameterError("missing log-density gradient");
  if (!(learning_rate > 0.0 && dt > 0.0 && temperature >= 0.0)) {
    throw ParameterError("OU process needs b > 0, dt > 0, temperature >= 0");
  }
}

std::vector<double> simulate_ou_sampling(const OuProcessSpec& spec,
                                         double theta0, Rng& rng) {
  spec.validate();
  std::vector<double> path;
  path.reserve(spec.steps + 1);
  path.push_back(theta0);
  const double drift_scale = spec.learning_rate * spec.dt;
  const double noise_scale =
      std::sqrt(2.0 * spec.temperature * spec.learning_rate * spec.dt);
  double theta = theta0;
  for (std::size_t s = 0; s < spec.steps; ++s) {
    theta += drift_scale * spec.log_density_gradient(theta);
    if (noise_scale > 0.0) theta += noise_scale * rng.normal();
    if (!std::isfinite(theta)) throw NumericError("OU trajectory diverged");
    path.push_back(theta);
  }
  return path;
}

}  // namespace fshnn
