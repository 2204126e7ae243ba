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

#include <benchmark/benchmark.h>

#include "fshnn/coding/coding.hpp"
#include "fshnn/io/config.hpp"
#include "fshnn/numerics/kernels.hpp"
#include "fshnn/spiking/simulate.hpp"
#include "fshnn/tailindex/tailindex.hpp"

namespace {

using namespace fshnn;

Tensor random_tensor(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (auto& x : t.data()) x = static_cast<float>(rng.uniform());
  return t;
}

void BM_Conv2dForward(benchmark::State& state) {
  Rng rng(1);
  const auto c = static_cast<std::size_t>(state.range(0));
  const Tensor input = random_tensor({c, 28, 28}, rng);
  const Tensor kernel = random_tensor({16, c, 5, 5}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_forward(input, kernel, 1, 2));
}
BENCHMARK(BM_Conv2dForward)->Arg(1)->Arg(8);

void BM_LifStep(benchmark::State& state) {
  const LifParams params;
  const auto n = static_cast<std::size_t>(state.range(0));
  LifState s = LifState::resting({n}, params);
  Rng rng(2);
  const Tensor current = random_tensor({n}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lif_step(s, current, params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LifStep)->Arg(1 << 10)->Arg(1 << 16);

// Default pattern network, one sample.
void BM_ForwardSimulate(benchmark::State& state) {
  const auto config = default_experiment_config();
  Rng rng(3);
  NetworkSpec net = config.network;
  net.initialize_parameters(rng, 1.0);
  EncoderParams encoder = config.encoder;
  encoder.steps = static_cast<std::size_t>(state.range(0));
  const SpikeTrain input = poisson_encode(random_tensor({1, 16, 16}, rng), encoder, rng);
  for (auto _ : state) benchmark::DoNotOptimize(forward_simulate(net, input));
}
BENCHMARK(BM_ForwardSimulate)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_PoissonEncode(benchmark::State& state) {
  Rng rng(4);
  const Tensor image = random_tensor({1, 28, 28}, rng);
  EncoderParams encoder;
  encoder.steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(poisson_encode(image, encoder, rng));
}
BENCHMARK(BM_PoissonEncode)->Arg(100)->Arg(1000);

void BM_EstimateTailIndex(benchmark::State& state) {
  Rng rng(5);
  const auto x = sample_alpha_stable(1.5, 1.0, static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tail_index(x));
}
BENCHMARK(BM_EstimateTailIndex)->Arg(40000)->Arg(400000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
