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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "girl/kernels.h"
#include "girl/rng.h"

namespace girl::kernels {
namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

void check_close(std::span<const double> a, std::span<const double> b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= 1e-12 * (1.0 + std::abs(a[i])));
  }
}

TEST_CASE("scalar kernels: hand-computed values") {
  const KernelTable& k = scalar_table();
  const std::vector<double> a{1, 2, 3}, b{4, -5, 6};
  CHECK(k.dot(a, b) == 12.0);

  std::vector<double> y{1, 1, 1};
  k.axpy(2.0, a, y);
  CHECK(y == std::vector<double>{3, 5, 7});

  // W = [[1, 2, 3], [4, 5, 6]]
  const std::vector<double> w{1, 2, 3, 4, 5, 6};
  std::vector<double> out(2);
  const std::vector<double> bias{0.5, -0.5};
  k.gemv({w, 2, 3}, a, bias, out);
  CHECK(out == std::vector<double>{14.5, 31.5});
  k.gemv({w, 2, 3}, a, {}, out);
  CHECK(out == std::vector<double>{14.0, 32.0});

  std::vector<double> t{0, 0, 0};
  const std::vector<double> v{1, -1};
  k.gemv_t({w, 2, 3}, v, t);
  CHECK(t == std::vector<double>{-3, -3, -3});

  std::vector<double> m(6, 0.0);
  k.ger(2.0, v, a, {m, 2, 3});
  CHECK(m == std::vector<double>{2, 4, 6, -2, -4, -6});
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const KernelTable* fast = avx2_table();
  if (fast == nullptr || !avx2_supported()) {
    MESSAGE("AVX2 kernels unavailable on this machine; skipping");
    return;
  }
  const KernelTable& ref = scalar_table();
  Rng rng(42);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 100u}) {
    const auto a = random_vec(n, rng);
    const auto b = random_vec(n, rng);
    CHECK(std::abs(ref.dot(a, b) - fast->dot(a, b)) <= 1e-12 * (1.0 + n));

    auto y1 = random_vec(n, rng);
    auto y2 = y1;
    ref.axpy(0.37, a, y1);
    fast->axpy(0.37, a, y2);
    check_close(y1, y2);

    for (std::size_t rows : {1u, 2u, 5u}) {
      const auto w = random_vec(rows * n, rng);
      const auto bias = random_vec(rows, rng);
      std::vector<double> g1(rows), g2(rows);
      ref.gemv({w, rows, n}, a, bias, g1);
      fast->gemv({w, rows, n}, a, bias, g2);
      check_close(g1, g2);

      const auto v = random_vec(rows, rng);
      auto t1 = random_vec(n, rng);
      auto t2 = t1;
      ref.gemv_t({w, rows, n}, v, t1);
      fast->gemv_t({w, rows, n}, v, t2);
      check_close(t1, t2);

      auto m1 = w;
      auto m2 = w;
      ref.ger(-1.3, v, a, {m1, rows, n});
      fast->ger(-1.3, v, a, {m2, rows, n});
      check_close(m1, m2);
    }
  }
}

TEST_CASE("backend selection") {
  const Backend initial = active_backend();
  set_backend(Backend::kScalar);
  CHECK(active_backend() == Backend::kScalar);
  CHECK(&active() == &scalar_table());
  CHECK(backend_name(Backend::kScalar) == "scalar");
  if (avx2_table() != nullptr && avx2_supported()) {
    set_backend(Backend::kAvx2);
    CHECK(&active() == avx2_table());
  } else {
    CHECK_THROWS(set_backend(Backend::kAvx2));
  }
  set_backend(initial);
}

}  // namespace
}  // namespace girl::kernels
