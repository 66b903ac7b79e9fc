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
#include <vector>

#include "doctest.h"

#include "hotspot/kernels.hpp"
#include "hotspot/rng.hpp"

namespace k = hotspot::kernels;

namespace {

std::vector<double> random_vec(hotspot::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-3.0, 3.0);
  return v;
}

}  // namespace

TEST_CASE("avx2 kernels agree with scalar reference") {
  if (!k::cpu_has_avx2() || k::avx2::table() == nullptr) {
    MESSAGE("no AVX2 on this host; skipping");
    return;
  }
  const auto& s = k::scalar::table();
  const auto& v = *k::avx2::table();
  hotspot::Rng rng(7);
  // Lengths around the 4-lane boundary plus a long one.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 33u, 1001u}) {
    CAPTURE(n);
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);

    const double ds = s.dot(a.data(), b.data(), n);
    const double dv = v.dot(a.data(), b.data(), n);
    CHECK(dv == doctest::Approx(ds).epsilon(1e-12));

    auto ys = b, yv = b;
    s.axpy(0.37, a.data(), ys.data(), n);
    v.axpy(0.37, a.data(), yv.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(yv[i] == doctest::Approx(ys[i]).epsilon(1e-14));

    ys = b, yv = b;
    s.max_into(a.data(), ys.data(), n);
    v.max_into(a.data(), yv.data(), n);
    CHECK(ys == yv);

    ys = b, yv = b;
    s.min_into(a.data(), ys.data(), n);
    v.min_into(a.data(), yv.data(), n);
    CHECK(ys == yv);

    // Exact: pooled features feed the golden files.
    ys = b, yv = b;
    s.sumsq_into(a.data(), ys.data(), n);
    v.sumsq_into(a.data(), yv.data(), n);
    CHECK(ys == yv);

    ys = b, yv = b;
    s.scale(-1.5, ys.data(), n);
    v.scale(-1.5, yv.data(), n);
    CHECK(ys == yv);
  }
}

TEST_CASE("set_isa switches the active table") {
  const auto before = k::active_isa();
  k::set_isa(k::Isa::kScalar);
  CHECK(k::active_isa() == k::Isa::kScalar);
  CHECK(k::isa_name(k::Isa::kScalar) == "scalar");
  k::set_isa(before);
}

TEST_CASE("gemv matches a naive loop") {
  hotspot::Rng rng(11);
  const std::size_t rows = 5, cols = 13;
  const auto w = random_vec(rng, rows * cols);
  const auto x = random_vec(rng, cols);
  const auto b = random_vec(rng, rows);
  std::vector<double> y(rows);
  k::gemv(w, rows, cols, x, b, y);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    for (std::size_t c = 0; c < cols; ++c) acc += w[r * cols + c] * x[c];
    CHECK(y[r] == doctest::Approx(acc).epsilon(1e-12));
  }

  std::vector<double> gx(cols, 0.0);
  k::gemv_t_accumulate(w, rows, cols, b, gx);
  for (std::size_t c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += w[r * cols + c] * b[r];
    CHECK(gx[c] == doctest::Approx(acc).epsilon(1e-12));
  }

  std::vector<double> gw(rows * cols, 1.0);
  k::outer_accumulate(2.0, b, x, gw);
  CHECK(gw[2 * cols + 3] == doctest::Approx(1.0 + 2.0 * b[2] * x[3]));
}
