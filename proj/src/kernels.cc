// Copyright 2026 The htdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "htdp/kernels.h"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace htdp::kernels {

#if defined(HTDP_BUILD_AVX2)
const KernelTable& Avx2Table();
#endif

namespace {

std::atomic<bool>& ForceFlag() {
  static std::atomic<bool> flag = [] {
    const char* env = std::getenv("HTDP_FORCE_SCALAR");
    return env != nullptr && std::strcmp(env, "0") != 0 && env[0] != '\0';
  }();
  return flag;
}

}  // namespace

const KernelTable* Avx2() {
#if defined(HTDP_BUILD_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &Avx2Table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& Active() {
  if (!ForceFlag().load(std::memory_order_relaxed)) {
    if (const KernelTable* t = Avx2()) return *t;
  }
  return Scalar();
}

void ForceScalar(bool force) {
  ForceFlag().store(force, std::memory_order_relaxed);
}

}  // namespace htdp::kernels
