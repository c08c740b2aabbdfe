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

// Inner-loop kernels over row-major sample blocks.
//
// Every column reduction uses the same canonical order: rows are dealt
// round-robin into four partial sums (row r of the block goes to partial
// r % 4, accumulated in increasing r), and the column total is
// (p0 + p1) + (p2 + p3). The scalar table implements this order literally and
// the SIMD tables reproduce it lane by lane, so all tables return bit-identical
// results. Code that mixes tables (or runs on machines with different ISA
// support) therefore produces the same estimates.

#ifndef HTDP_KERNELS_H_
#define HTDP_KERNELS_H_

#include <cstddef>

namespace htdp::kernels {

struct KernelTable {
  const char* name;

  // sums[j] = sum over rows of clip(data[i*d + j], lo[j], hi[j]).
  void (*clipped_column_sums)(const double* data, std::size_t rows,
                              std::size_t d, const double* lo, const double* hi,
                              double* sums);

  // sums[j] = sum over rows of SmoothedPhi(data[i*d + j], tau, c).
  void (*smoothed_phi_column_sums)(const double* data, std::size_t rows,
                                   std::size_t d, double tau, double c,
                                   double* sums);

  // out[i*d + j] = w[j] - data[i*d + j].
  void (*residuals)(const double* w, const double* data, std::size_t rows,
                    std::size_t d, double* out);
};

const KernelTable& Scalar();

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* Avx2();

// The table used by the estimators: the widest supported one, unless
// ForceScalar(true) or the HTDP_FORCE_SCALAR environment variable is set.
const KernelTable& Active();

void ForceScalar(bool force);

}  // namespace htdp::kernels

#endif  // HTDP_KERNELS_H_
