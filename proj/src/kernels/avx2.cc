// Copyright 2026 The psro-girl Authors.
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

// Compiled with -mavx2 -mfma. Only reached through the dispatch table after
// a CPUID check, so no AVX2 instruction executes on older hardware.

#include <immintrin.h>

#include "girl/kernels.h"

namespace girl::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 4),
                           _mm256_loadu_pd(pb + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += pa[i] * pb[i];
  return acc;
}

void axpy_avx2(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y.data() + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy);
    _mm256_storeu_pd(y.data() + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_avx2(ConstMatrix w, std::span<const double> x,
               std::span<const double> bias, std::span<double> y) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double base = bias.empty() ? 0.0 : bias[r];
    y[r] = base + dot_avx2(w.data.subspan(r * w.cols, w.cols), x);
  }
}

void gemv_t_avx2(ConstMatrix w, std::span<const double> v,
                 std::span<double> y) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    axpy_avx2(v[r], w.data.subspan(r * w.cols, w.cols), y);
  }
}

void ger_avx2(double alpha, std::span<const double> u,
              std::span<const double> v, MutableMatrix w) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    axpy_avx2(alpha * u[r], v, w.data.subspan(r * w.cols, w.cols));
  }
}

constexpr KernelTable kAvx2Table = {dot_avx2, axpy_avx2, gemv_avx2,
                                    gemv_t_avx2, ger_avx2};

}  // namespace

const KernelTable* avx2_table_impl() { return &kAvx2Table; }

}  // namespace girl::kernels
