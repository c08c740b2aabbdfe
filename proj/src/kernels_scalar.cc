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

#include <algorithm>
#include <vector>

#include "htdp/kernels.h"
#include "htdp/smoothing.h"

namespace htdp::kernels {
namespace {

// Canonical four-way reduction; see kernels.h.
template <typename Op>
void ColumnSums(const double* data, std::size_t rows, std::size_t d, Op op,
                double* sums) {
  std::vector<double> partial(4 * d, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double* p = partial.data() + (i % 4) * d;
    const double* row = data + i * d;
    for (std::size_t j = 0; j < d; ++j) p[j] += op(row[j], j);
  }
  for (std::size_t j = 0; j < d; ++j) {
    sums[j] = (partial[j] + partial[d + j]) +
              (partial[2 * d + j] + partial[3 * d + j]);
  }
}

void ClippedColumnSums(const double* data, std::size_t rows, std::size_t d,
                       const double* lo, const double* hi, double* sums) {
  ColumnSums(
      data, rows, d,
      [lo, hi](double x, std::size_t j) { return std::min(hi[j], std::max(lo[j], x)); },
      sums);
}

void SmoothedPhiColumnSums(const double* data, std::size_t rows, std::size_t d,
                           double tau, double c, double* sums) {
  const SmoothingConstants k(tau, c);
  ColumnSums(
      data, rows, d, [&k](double x, std::size_t) { return SmoothedPhi(x, k); },
      sums);
}

void Residuals(const double* w, const double* data, std::size_t rows,
               std::size_t d, double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = w[j] - data[i * d + j];
  }
}

}  // namespace

const KernelTable& Scalar() {
  static const KernelTable table{"scalar", &ClippedColumnSums,
                                 &SmoothedPhiColumnSums, &Residuals};
  return table;
}

}  // namespace htdp::kernels
