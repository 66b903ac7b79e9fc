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

#pragma once

// Data-parallel inner loops shared by the classifiers and pooling code.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is picked once at startup from CPUID; the
// HOTSPOT_SIMD environment variable ("scalar" or "avx2") overrides it.
// Variants agree to within floating-point reassociation error; they are not
// bit-identical, but each one is deterministic.

#include <cstddef>
#include <span>
#include <string_view>

namespace hotspot::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*max_into)(const double* x, double* y, std::size_t n);
  void (*min_into)(const double* x, double* y, std::size_t n);
  void (*sumsq_into)(const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* y, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}
namespace avx2 {
/// Null when the AVX2 variant was not compiled in.
const KernelTable* table();
}

bool cpu_has_avx2();
Isa active_isa();
std::string_view isa_name(Isa isa);
/// Forces a variant; throws std::invalid_argument if it is unavailable.
void set_isa(Isa isa);
const KernelTable& table_for(Isa isa);
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
/// y = max(y, x) elementwise
inline void max_into(std::span<const double> x, std::span<double> y) {
  active().max_into(x.data(), y.data(), x.size());
}
inline void min_into(std::span<const double> x, std::span<double> y) {
  active().min_into(x.data(), y.data(), x.size());
}
/// y += x * x elementwise
inline void sumsq_into(std::span<const double> x, std::span<double> y) {
  active().sumsq_into(x.data(), y.data(), x.size());
}
inline void scale(double alpha, std::span<double> y) {
  active().scale(alpha, y.data(), y.size());
}

/// y = W x + b for a row-major rows x cols matrix W.
void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> b,
          std::span<double> y);

/// gx += W^T g
void gemv_t_accumulate(std::span<const double> w, std::size_t rows,
                       std::size_t cols, std::span<const double> g,
                       std::span<double> gx);

/// gw += alpha * g x^T
void outer_accumulate(double alpha, std::span<const double> g,
                      std::span<const double> x, std::span<double> gw);

}  // namespace hotspot::kernels
