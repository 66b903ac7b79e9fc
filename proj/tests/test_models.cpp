// Copyright 2026 The Hotspot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "hotspot/error.hpp"
#include "hotspot/models.hpp"

using namespace hotspot;

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (auto& v : m.data) v = rng.normal();
  return m;
}

std::vector<int> random_labels(Rng& rng, std::size_t n) {
  std::vector<int> y(n);
  for (auto& v : y) v = rng.bernoulli(0.3) ? 1 : 0;
  y[0] = 1;
  y[1] = 0;
  return y;
}

// Minimizes a convex function of one variable on [lo, hi].
template <typename F>
double ternary(F f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    if (f(a) < f(b)) hi = b; else lo = a;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("class weights") {
  std::vector<int> y(1000, 0);
  std::fill(y.begin(), y.begin() + 200, 1);
  const auto w = class_weights(y);
  CHECK(w.hot == doctest::Approx(2.5));
  CHECK(w.not_hot == doctest::Approx(0.625));
  const auto s = sample_weights(y, w);
  CHECK(s[0] == 2.5);
  CHECK(s[999] == 0.625);
  CHECK_THROWS_AS(class_weights(std::vector<int>(5, 1)), ValidationError);
}

TEST_CASE("LR gradient matches finite differences") {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto z = random_matrix(rng, 30, 5);
    const auto y = random_labels(rng, 30);
    const auto w = sample_weights(y, class_weights(y));
    std::vector<double> p(6);
    for (auto& v : p) v = rng.normal();
    CHECK(oracle::lr_gradient_error(p, z, y, w, 0.1) < 1e-6);
  }
}

TEST_CASE("weighted loss equals loss on duplicated rows") {
  Rng rng(2);
  const auto z = random_matrix(rng, 12, 3);
  const auto y = random_labels(rng, 12);
  std::vector<double> w(12, 1.0);
  w[4] = 3.0;
  Matrix dup(14, 3);
  std::vector<int> ydup(y);
  std::copy(z.data.begin(), z.data.end(), dup.data.begin());
  for (int k = 0; k < 2; ++k) {
    std::copy(z.row(4).begin(), z.row(4).end(), dup.row(12 + k).begin());
    ydup.push_back(y[4]);
  }
  const std::vector<double> p = {0.3, -0.7, 1.1, 0.2};
  std::vector<double> g1(4), g2(4);
  const double a = lr_loss_and_gradient(p, z, y, w, 0.05, g1);
  const double b = lr_loss_and_gradient(p, dup, ydup, std::vector<double>(14, 1.0), 0.05, g2);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-12));
}

TEST_CASE("LR fit agrees with a nested ternary-search minimizer") {
  Rng rng(3);
  const std::size_t n = 60;
  Matrix x(n, 1);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 4 == 0 ? 1 : 0;
    x.at(i, 0) = 5.0 + 2.0 * rng.normal() + (y[i] ? 1.5 : 0.0);
  }
  const auto w = sample_weights(y, class_weights(y));
  const double lambda = 0.01;
  LRConfig cfg;
  cfg.l2_lambda = lambda;
  cfg.grad_tol = 1e-8;
  cfg.max_iters = 200000;
  const auto model = train_lr(x, y, w, {{"f", 1}}, cfg);
  CHECK(model.converged);

  double mean = 0.0, var = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x.at(i, 0);
  mean /= n;
  for (std::size_t i = 0; i < n; ++i) var += std::pow(x.at(i, 0) - mean, 2);
  const double sd = std::sqrt(var / n);
  double wsum = 0.0;
  for (double v : w) wsum += v;
  auto objective = [&](double a, double b) {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = b + a * (x.at(i, 0) - mean) / sd;
      loss += w[i] * (y[i] ? softplus(-s) : softplus(s));
    }
    return loss / wsum + 0.5 * lambda * a * a;
  };
  auto best_b = [&](double a) { return ternary([&](double b) { return objective(a, b); }, -20, 20); };
  const double a = ternary([&](double a) { return objective(a, best_b(a)); }, -20, 20);
  const double b = best_b(a);
  for (double probe : {0.0, 3.0, 5.0, 7.5, 12.0}) {
    const std::vector<double> xv = {probe};
    CHECK(model.decision(xv) == doctest::Approx(b + a * (probe - mean) / sd).epsilon(1e-5));
  }
}

TEST_CASE("LR errors and neutral model") {
  LRModel zero;
  zero.schema = {{"f", 2}};
  zero.mean = {0.0, 0.0};
  zero.scale = {1.0, 1.0};
  zero.weights = {0.0, 0.0};
  const auto p = zero.predict(std::vector<double>{3.0, -4.0});
  CHECK(p.p_hot == 0.5);
  CHECK(p.p_not == 0.5);
  CHECK_FALSE(p.hot());
  CHECK_THROWS_AS(zero.decision(std::vector<double>{1.0}), ValidationError);

  Matrix x(2, 1);
  x.at(0, 0) = NAN;
  const std::vector<int> y = {1, 0};
  const std::vector<double> w = {1.0, 1.0};
  CHECK_THROWS_AS(train_lr(x, y, w, {{"f", 1}}), NumericError);
  CHECK_THROWS_AS(train_lr(Matrix(0, 1), {}, {}, {{"f", 1}}), ValidationError);
  CHECK_THROWS_AS(train_lr(Matrix(2, 1), y, w, {{"f", 2}}), ValidationError);
}

TEST_CASE("architecture strings") {
  const auto a = MLPArch::parse("988-512-128-16-Pool-2", 0.4);
  CHECK(a.pooled);
  CHECK(a.sizes == std::vector<std::size_t>{988, 512, 128, 16, 2});
  CHECK(a.to_string() == "988-512-128-16-Pool-2");
  CHECK(MLPArch::parse("1024-64-32-12-2").to_string() == "1024-64-32-12-2");
  for (const char* bad : {"10-3", "10", "10-Pool-2", "10-4-Pool-4-2", "10-x-2", "10-0-2",
                          "10-4-Pool-Pool-2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(MLPArch::parse(bad), ValidationError);
  }
  CHECK_THROWS_AS(MLPArch::parse("10-4-2", 1.0), ValidationError);
}

TEST_CASE("MLP gradients match finite differences") {
  Rng rng(4);
  SUBCASE("flat") {
    for (int trial = 0; trial < 5; ++trial) {
      const auto x = random_matrix(rng, 8, 6);
      const auto y = random_labels(rng, 8);
      const auto w = sample_weights(y, class_weights(y));
      MLPModel m(MLPArch::parse("6-5-3-2", 0.5), {{"f", 6}}, 100 + trial);
      const auto data = MLPData::from_matrix(x, y, w);
      const std::vector<std::size_t> batch = {0, 1, 2, 3, 4, 5, 6, 7};
      CHECK(oracle::mlp_gradient_error(m, data, batch) < 1e-6);
    }
  }
  SUBCASE("pooled") {
    std::vector<ProsodyGrid> grids;
    for (int i = 0; i < 4; ++i) grids.push_back(oracle::random_grid(rng, 3, 4, 5));
    const std::vector<int> y = {1, 0, 0, 1};
    const std::vector<double> w = {1.0, 1.0, 2.0, 0.5};
    const auto data = MLPData::from_grids([&](std::size_t i) { return grids[i]; }, 4, y, w);
    for (int trial = 0; trial < 5; ++trial) {
      MLPModel m(MLPArch::parse("5-4-3-Pool-2"), {{"prosody", 5}}, 200 + trial);
      const std::vector<std::size_t> batch = {0, 1, 2, 3};
      CHECK(oracle::mlp_gradient_error(m, data, batch) < 1e-6);
    }
  }
}

TEST_CASE("posteriors are normalized") {
  Rng rng(5);
  MLPModel m(MLPArch::parse("4-3-2"), {{"f", 4}}, 9);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> x(4);
    for (auto& v : x) v = 3.0 * rng.normal();
    const auto p = m.predict(x);
    CHECK(p.p_hot + p.p_not == doctest::Approx(1.0));
    CHECK(std::exp(p.log_hot) == doctest::Approx(p.p_hot));
    CHECK(std::exp(p.log_not) == doctest::Approx(p.p_not));
  }
  CHECK_THROWS_AS(m.predict(std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("MLP training is deterministic and learns a separable problem") {
  Rng rng(6);
  const std::size_t n = 200;
  Matrix x(n, 3);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 3 == 0;
    for (std::size_t d = 0; d < 3; ++d) x.at(i, d) = rng.normal() + (y[i] ? 2.0 : 0.0);
  }
  const auto w = sample_weights(y, class_weights(y));
  const auto data = MLPData::from_matrix(x, y, w);
  MLPConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.epochs = 30;
  cfg.seed = 77;
  const auto arch = MLPArch::parse("3-8-2", 0.2);
  const auto a = train_mlp(data, &data, arch, {{"f", 3}}, cfg);
  const auto b = train_mlp(data, &data, arch, {{"f", 3}}, cfg);
  CHECK(a.flat_parameters() == b.flat_parameters());
  CHECK(a.best_dev_uar > 0.9);

  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train_mlp(data, nullptr, arch, {{"f", 3}}, cfg), ValidationError);
}

TEST_CASE("model files round trip and schema mismatch is reported") {
  MLPModel m(MLPArch::parse("4-3-Pool-2", 0.1), {{"prosody", 4}}, 3);
  const auto back = mlp_from_json(mlp_to_json(m));
  CHECK(back.flat_parameters() == m.flat_parameters());
  CHECK(back.arch().to_string() == m.arch().to_string());

  try {
    check_schema({{"activity", 8}, {"embed", 32}}, {{"activity", 8}, {"embed", 16}});
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("embed") != std::string::npos);
  }
}
