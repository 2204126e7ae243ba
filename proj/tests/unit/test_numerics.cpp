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
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fshnn/numerics/kernels.hpp"
#include "fshnn/numerics/rng.hpp"
#include "fshnn/numerics/tensor.hpp"

using namespace fshnn;

TEST_CASE("conv2d cross-correlates a 2x2 input with an identity kernel") {
  const Tensor input({1, 2, 2}, {1, 2, 3, 4});
  const Tensor kernel({1, 1, 2, 2}, {1, 0, 0, 1});
  const Tensor out = conv2d_forward(input, kernel, 1, 0);
  REQUIRE(out.shape() == Shape{1, 1, 1});
  CHECK(out[0] == 5.0f);
}

TEST_CASE("conv2d matches a brute-force loop with stride and padding") {
  Rng rng(3);
  Tensor input({2, 5, 6});
  Tensor kernel({3, 2, 3, 3});
  for (auto& v : input.data()) v = static_cast<float>(rng.normal());
  for (auto& v : kernel.data()) v = static_cast<float>(rng.normal());
  const Tensor out = conv2d_forward(input, kernel, 2, 1);
  REQUIRE(out.shape() == Shape{3, 3, 3});
  for (std::size_t o = 0; o < 3; ++o) {
    for (std::size_t y = 0; y < 3; ++y) {
      for (std::size_t x = 0; x < 3; ++x) {
        double acc = 0.0;
        for (int c = 0; c < 2; ++c) {
          for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
              const int iy = static_cast<int>(y) * 2 + ky - 1;
              const int ix = static_cast<int>(x) * 2 + kx - 1;
              if (iy < 0 || iy >= 5 || ix < 0 || ix >= 6) continue;
              acc += kernel.at(o, c, ky, kx) * input.at(c, iy, ix);
            }
          }
        }
        CHECK(out.at(o, y, x) == doctest::Approx(acc).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("conv2d rejects a kernel larger than the padded input") {
  const Tensor input({1, 2, 2});
  const Tensor kernel({1, 1, 3, 3});
  CHECK_THROWS_AS(conv2d_forward(input, kernel, 1, 0), DimensionError);
  CHECK_THROWS_AS(conv2d_forward(input, Tensor({1, 2, 3, 3}), 1, 1),
                  DimensionError);
}

TEST_CASE("fc is a matrix-vector product") {
  const Tensor w({2, 2}, {1, 2, 3, 4});
  const Tensor x = Tensor::vector({1, 1});
  const Tensor y = fc_forward(x, w);
  CHECK(y[0] == 3.0f);
  CHECK(y[1] == 7.0f);
  const Tensor b = Tensor::vector({0.5f, -1.0f});
  const Tensor yb = fc_forward(x, w, &b);
  CHECK(yb[0] == 3.5f);
  CHECK(yb[1] == 6.0f);
  CHECK_THROWS_AS(fc_forward(Tensor::vector({1, 2, 3}), w), DimensionError);
}

TEST_CASE("fc backward kernels agree with finite differences") {
  const TensorD w({2, 3}, {0.3, -1.2, 0.7, 2.0, 0.1, -0.4});
  const TensorD x = TensorD::vector({0.5, -1.5, 2.0});
  const TensorD g = TensorD::vector({1.0, -2.0});
  // Scalar objective g . (W x).
  const std::function<double(const TensorD&)> by_x = [&](const TensorD& v) {
    const auto y = fc_forward(v, w);
    return g[0] * y[0] + g[1] * y[1];
  };
  const auto fd_x = finite_difference_gradient(by_x, x, 1e-6);
  const auto grad_x = fc_backward_input(g, w, x.shape());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(grad_x[i] == doctest::Approx(fd_x[i]).epsilon(1e-6));
  }
  TensorD grad_w({2, 3});
  fc_accumulate_weight_grad(g, x, grad_w);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(grad_w.at(i, j) == doctest::Approx(g[i] * x[j]));
    }
  }
}

TEST_CASE("conv2d backward kernels agree with finite differences") {
  Rng rng(5);
  TensorD input({2, 4, 4});
  TensorD kernel({2, 2, 3, 3});
  TensorD g({2, 2, 2});
  for (auto& v : input.data()) v = rng.normal();
  for (auto& v : kernel.data()) v = rng.normal();
  for (auto& v : g.data()) v = rng.normal();
  auto dot = [&](const TensorD& out) {
    return std::inner_product(out.data().begin(), out.data().end(),
                              g.data().begin(), 0.0);
  };
  const std::function<double(const TensorD&)> by_input =
      [&](const TensorD& v) { return dot(conv2d_forward(v, kernel, 1, 0)); };
  const std::function<double(const TensorD&)> by_kernel =
      [&](const TensorD& k) { return dot(conv2d_forward(input, k, 1, 0)); };
  const auto fd_in = finite_difference_gradient(by_input, input, 1e-6);
  const auto fd_k = finite_difference_gradient(by_kernel, kernel, 1e-6);
  const auto grad_in = conv2d_backward_input(g, kernel, input.shape(), 1, 0);
  TensorD grad_k(kernel.shape());
  conv2d_accumulate_weight_grad(g, input, 1, 0, grad_k);
  for (std::size_t i = 0; i < input.size(); ++i) {
    CHECK(grad_in[i] == doctest::Approx(fd_in[i]).epsilon(1e-6));
  }
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    CHECK(grad_k[i] == doctest::Approx(fd_k[i]).epsilon(1e-6));
  }
}

TEST_CASE("pooling") {
  const Tensor input({1, 2, 2}, {1, 2, 3, 4});
  CHECK(avgpool2d(input, 2)[0] == 2.5f);
  CHECK(maxpool2d(input, 2)[0] == 4.0f);
  CHECK_THROWS_AS(avgpool2d(Tensor({1, 3, 3}), 2), DimensionError);
  const Tensor grad = avgpool2d_backward(Tensor({1, 1, 1}, {1.0f}),
                                         input.shape(), 2);
  for (auto v : grad.data()) CHECK(v == 0.25f);
}

TEST_CASE("softmax") {
  const auto p = softmax(TensorD::vector({1, 2, 3}));
  CHECK(p[0] == doctest::Approx(0.09003).epsilon(1e-5));
  CHECK(p[1] == doctest::Approx(0.24473).epsilon(1e-5));
  CHECK(p[2] == doctest::Approx(0.66524).epsilon(1e-5));
  // Shift invariance keeps large logits finite.
  const auto big = softmax(TensorD::vector({1001, 1002, 1003}));
  for (std::size_t i = 0; i < 3; ++i) CHECK(big[i] == doctest::Approx(p[i]));
  CHECK_THROWS_AS(softmax(TensorD::vector({1.0, std::nan("")})), NumericError);
  CHECK(log_sum_exp(TensorD::vector({0.0, 0.0})) ==
        doctest::Approx(std::log(2.0)));
}

TEST_CASE("finite difference gradient of x^2 at 3") {
  const std::function<double(const TensorD&)> f = [](const TensorD& x) {
    return x[0] * x[0];
  };
  const auto g = finite_difference_gradient(f, TensorD::vector({3.0}), 1e-4);
  CHECK(std::abs(g[0] - 6.0) < 1e-6);
}

TEST_CASE("tensor shape validation") {
  CHECK_THROWS_AS(Tensor(Shape{}), DimensionError);
  CHECK_THROWS_AS(Tensor(Shape{2, 0}), DimensionError);
  CHECK_THROWS_AS(Tensor(Shape{2, 2}, std::vector<float>{1, 2, 3}),
                  DimensionError);
  const Tensor t({2, 3}, {0, 1, 2, 3, 4, 5});
  CHECK(t.at(1, 2) == 5.0f);
  CHECK(t.reshaped({3, 2}).at(2, 1) == 5.0f);
}

TEST_CASE("rng streams are reproducible and independent") {
  Rng a(42, 1), b(42, 1), c(42, 2);
  std::vector<std::uint64_t> xa, xb, xc;
  for (int i = 0; i < 16; ++i) {
    xa.push_back(a.next());
    xb.push_back(b.next());
    xc.push_back(c.next());
  }
  CHECK(xa == xb);
  CHECK(xa != xc);
  CHECK(Rng(7).substream(3) == Rng(7, 3));
}

TEST_CASE("rng distributions have the right moments") {
  Rng rng(11);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    hits += rng.bernoulli(0.3) ? 1 : 0;
    REQUIRE(rng.uniform_int(5) < 5);
    REQUIRE(rng.uniform_open() > 0.0);
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(static_cast<double>(hits) / n == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v(20);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w(v.begin(), v.end());
  Rng r1(9), r2(9);
  r1.shuffle(std::span<int>(v));
  r2.shuffle(std::span<int>(w));
  CHECK(v == w);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 20; ++i) CHECK(sorted[i] == i);
}
