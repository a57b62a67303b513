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

#include "girl/kernels.h"

namespace girl::kernels {
namespace {

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void gemv_scalar(ConstMatrix w, std::span<const double> x,
                 std::span<const double> bias, std::span<double> y) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double* row = w.data.data() + r * w.cols;
    double acc = bias.empty() ? 0.0 : bias[r];
    for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void gemv_t_scalar(ConstMatrix w, std::span<const double> v,
                   std::span<double> y) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double* row = w.data.data() + r * w.cols;
    const double vr = v[r];
    for (std::size_t c = 0; c < w.cols; ++c) y[c] += row[c] * vr;
  }
}

void ger_scalar(double alpha, std::span<const double> u,
                std::span<const double> v, MutableMatrix w) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    double* row = w.data.data() + r * w.cols;
    const double s = alpha * u[r];
    for (std::size_t c = 0; c < w.cols; ++c) row[c] += s * v[c];
  }
}

constexpr KernelTable kScalarTable = {dot_scalar, axpy_scalar, gemv_scalar,
                                      gemv_t_scalar, ger_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalarTable; }

}  // namespace girl::kernels
