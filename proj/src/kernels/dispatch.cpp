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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "hotspot/kernels.hpp"

namespace hotspot::kernels {

#ifndef HOTSPOT_HAVE_AVX2
namespace avx2 {
const KernelTable* table() { return nullptr; }
}  // namespace avx2
#endif

bool cpu_has_avx2() {
#if defined(HOTSPOT_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Isa detect() {
  if (const char* env = std::getenv("HOTSPOT_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::kScalar;
    if (v == "avx2" && cpu_has_avx2()) return Isa::kAvx2;
  }
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{&table_for(detect())};
  return table;
}

}  // namespace

const KernelTable& table_for(Isa isa) {
  if (isa == Isa::kAvx2) {
    const KernelTable* t = avx2::table();
    if (t == nullptr || !cpu_has_avx2()) {
      throw std::invalid_argument("AVX2 kernels are not available on this CPU");
    }
    return *t;
  }
  return scalar::table();
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Isa active_isa() {
  return &active() == &scalar::table() ? Isa::kScalar : Isa::kAvx2;
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

void set_isa(Isa isa) { current().store(&table_for(isa)); }

void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> b,
          std::span<double> y) {
  const auto& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = b[r] + k.dot(w.data() + r * cols, x.data(), cols);
  }
}

void gemv_t_accumulate(std::span<const double> w, std::size_t rows,
                       std::size_t cols, std::span<const double> g,
                       std::span<double> gx) {
  const auto& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) k.axpy(g[r], w.data() + r * cols, gx.data(), cols);
  }
}

void outer_accumulate(double alpha, std::span<const double> g,
                      std::span<const double> x, std::span<double> gw) {
  const auto& k = active();
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < g.size(); ++r) {
    const double a = alpha * g[r];
    if (a != 0.0) k.axpy(a, x.data(), gw.data() + r * cols, cols);
  }
}

}  // namespace hotspot::kernels
