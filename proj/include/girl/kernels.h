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

#ifndef GIRL_KERNELS_H_
#define GIRL_KERNELS_H_

// Dense double-precision kernels used by the policy network and the
// meta-game solver. Each kernel has a scalar reference implementation and,
// on x86-64, an AVX2+FMA variant. The active backend is picked once at
// startup from CPUID and can be overridden with GIRL_KERNELS=scalar|avx2
// or set_backend().
//
// Matrices are row-major. The two backends agree to within floating-point
// reassociation error, not bit-for-bit; a single process always uses one
// backend, so runs stay reproducible on a given machine.

#include <cstddef>
#include <span>
#include <string_view>

namespace girl::kernels {

enum class Backend { kScalar, kAvx2 };

struct ConstMatrix {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct MutableMatrix {
  std::span<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Table of kernel entry points for one backend.
struct KernelTable {
  double (*dot)(std::span<const double> a, std::span<const double> b);
  // y += alpha * x
  void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);
  // y = W x + bias (bias may be empty)
  void (*gemv)(ConstMatrix w, std::span<const double> x,
               std::span<const double> bias, std::span<double> y);
  // y += W^T v
  void (*gemv_t)(ConstMatrix w, std::span<const double> v, std::span<double> y);
  // W += alpha * u v^T
  void (*ger)(double alpha, std::span<const double> u,
              std::span<const double> v, MutableMatrix w);
};

const KernelTable& scalar_table();
// Null when the library was built without AVX2 support.
const KernelTable* avx2_table();

bool avx2_supported();
Backend active_backend();
// Throws InvalidArgument when the requested backend is unavailable.
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);

const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a, b);
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x, y);
}
inline void gemv(ConstMatrix w, std::span<const double> x,
                 std::span<const double> bias, std::span<double> y) {
  active().gemv(w, x, bias, y);
}
inline void gemv_t(ConstMatrix w, std::span<const double> v,
                   std::span<double> y) {
  active().gemv_t(w, v, y);
}
inline void ger(double alpha, std::span<const double> u,
                std::span<const double> v, MutableMatrix w) {
  active().ger(alpha, u, v, w);
}

}  // namespace girl::kernels

#endif  // GIRL_KERNELS_H_
