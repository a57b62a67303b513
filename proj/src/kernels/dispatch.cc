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

#include <atomic>
#include <cstdlib>
#include <string>

#include "girl/errors.h"
#include "girl/kernels.h"

namespace girl::kernels {

#if GIRL_WITH_AVX2
const KernelTable* avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if GIRL_WITH_AVX2
  return avx2_table_impl();
#else
  return nullptr;
#endif
}

bool avx2_supported() {
#if GIRL_WITH_AVX2 && (defined(__GNUC__) || defined(__clang__))
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported;
#else
  return false;
#endif
}

namespace {

Backend initial_backend() {
  const char* env = std::getenv("GIRL_KERNELS");
  if (env != nullptr && std::string(env) == "scalar") return Backend::kScalar;
  return avx2_supported() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

}  // namespace

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (backend == Backend::kAvx2 && !avx2_supported()) {
    throw InvalidArgument("AVX2 kernels are not available on this machine");
  }
  backend_slot().store(backend, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

const KernelTable& active() {
  if (active_backend() == Backend::kAvx2) return *avx2_table();
  return scalar_table();
}

}  // namespace girl::kernels
