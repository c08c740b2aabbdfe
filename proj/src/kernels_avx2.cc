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

// AVX2 variants of the scalar kernels. Only compiled with -mavx2 and only
// selected when the CPU reports AVX2. Lane layouts:
//   d % 4 == 0 : one register spans four coordinates of one row
//   d == 2     : one register spans two consecutive rows
//   d == 1     : one register spans four consecutive rows
// Anything else goes through the scalar path for the leftover columns.

#include <immintrin.h>

#include <algorithm>
#include <array>
#include <vector>

#include "htdp/kernels.h"
#include "htdp/smoothing.h"

namespace htdp::kernels {
namespace {

// Vector form of min(hi, max(lo, x)) with the same tie behaviour as std::.
struct ClipOp {
  __m256d lo;
  __m256d hi;
  const double* lo_s;
  const double* hi_s;

  __m256d operator()(__m256d x) const {
    return _mm256_min_pd(_mm256_max_pd(x, lo), hi);
  }
  double scalar(double x, std::size_t j) const {
    return std::min(hi_s[j], std::max(lo_s[j], x));
  }
};

// Lanes outside the fast-path region take the scalar closed form.
[[gnu::noinline, gnu::cold]] __m256d SmoothedFallback(
    __m256d x, __m256d v, int mask, const SmoothingConstants& k) {
  alignas(32) std::array<double, 4> xs;
  alignas(32) std::array<double, 4> vs;
  _mm256_store_pd(xs.data(), x);
  _mm256_store_pd(vs.data(), v);
  for (int l = 0; l < 4; ++l) {
    if (!(mask & (1 << l))) vs[l] = SmoothedPhi(xs[l], k);
  }
  return _mm256_load_pd(vs.data());
}

struct SmoothedOp {
  const SmoothingConstants* k;
  __m256d inv_tau;
  __m256d cubic_sixth;
  __m256d fast_factor;
  __m256d limit;
  __m256d abs_mask;

  explicit SmoothedOp(const SmoothingConstants* kc)
      : k(kc),
        inv_tau(_mm256_set1_pd(kc->inv_tau)),
        cubic_sixth(_mm256_set1_pd(kc->cubic_sixth)),
        fast_factor(_mm256_set1_pd(kc->fast_factor)),
        limit(_mm256_set1_pd(kSqrt2)),
        abs_mask(_mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL))) {}

  __m256d operator()(__m256d x) const {
    const __m256d a = _mm256_mul_pd(x, inv_tau);
    const __m256d a2 = _mm256_mul_pd(a, a);
    const __m256d a3 = _mm256_mul_pd(a2, a);
    const __m256d v =
        _mm256_sub_pd(a, _mm256_mul_pd(a3, cubic_sixth));
    const __m256d ok = _mm256_cmp_pd(
        _mm256_mul_pd(_mm256_and_pd(a, abs_mask), fast_factor), limit,
        _CMP_LT_OQ);
    const int mask = _mm256_movemask_pd(ok);
    if (__builtin_expect(mask == 0xF, 1)) return v;
    return SmoothedFallback(x, v, mask, *k);
  }
  double scalar(double x, std::size_t) const { return SmoothedPhi(x, *k); }
};

// Writes partial[r][j0..j0+3] for the d % 4 == 0 layout.
inline void Store4(double* dst, __m256d v) { _mm256_storeu_pd(dst, v); }

template <typename Op>
void ColumnSumsWide(const double* data, std::size_t rows, std::size_t d,
                    std::size_t j0, const Op& op, double* partial) {
  __m256d acc[4] = {_mm256_setzero_pd(), _mm256_setzero_pd(),
                    _mm256_setzero_pd(), _mm256_setzero_pd()};
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    const double* base = data + i * d + j0;
    acc[0] = _mm256_add_pd(acc[0], op(_mm256_loadu_pd(base)));
    acc[1] = _mm256_add_pd(acc[1], op(_mm256_loadu_pd(base + d)));
    acc[2] = _mm256_add_pd(acc[2], op(_mm256_loadu_pd(base + 2 * d)));
    acc[3] = _mm256_add_pd(acc[3], op(_mm256_loadu_pd(base + 3 * d)));
  }
  for (; i < rows; ++i) {
    acc[i % 4] =
        _mm256_add_pd(acc[i % 4], op(_mm256_loadu_pd(data + i * d + j0)));
  }
  for (int r = 0; r < 4; ++r) Store4(partial + r * d + j0, acc[r]);
}

template <typename Op>
void ColumnSumsPairs(const double* data, std::size_t rows, const Op& op,
                     double* partial) {
  // Register A holds rows (4q, 4q+1), register B rows (4q+2, 4q+3).
  __m256d a = _mm256_setzero_pd();
  __m256d b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    a = _mm256_add_pd(a, op(_mm256_loadu_pd(data + i * 2)));
    b = _mm256_add_pd(b, op(_mm256_loadu_pd(data + i * 2 + 4)));
  }
  alignas(32) std::array<double, 4> la;
  alignas(32) std::array<double, 4> lb;
  _mm256_store_pd(la.data(), a);
  _mm256_store_pd(lb.data(), b);
  // partial layout is [r][j] with d = 2.
  partial[0] = la[0];
  partial[1] = la[1];
  partial[2] = la[2];
  partial[3] = la[3];
  partial[4] = lb[0];
  partial[5] = lb[1];
  partial[6] = lb[2];
  partial[7] = lb[3];
  for (; i < rows; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      partial[(i % 4) * 2 + j] += op.scalar(data[i * 2 + j], j);
    }
  }
}

template <typename Op>
void ColumnSumsSingle(const double* data, std::size_t rows, const Op& op,
                      double* partial) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    acc = _mm256_add_pd(acc, op(_mm256_loadu_pd(data + i)));
  }
  _mm256_storeu_pd(partial, acc);
  for (; i < rows; ++i) partial[i % 4] += op.scalar(data[i], 0);
}

template <typename Op>
void ColumnSums(const double* data, std::size_t rows, std::size_t d,
                const Op& op, double* sums) {
  std::vector<double> partial(4 * d, 0.0);
  std::size_t done = 0;
  if (d == 1) {
    ColumnSumsSingle(data, rows, op, partial.data());
    done = 1;
  } else if (d == 2) {
    ColumnSumsPairs(data, rows, op, partial.data());
    done = 2;
  } else {
    for (; done + 4 <= d; done += 4) {
      ColumnSumsWide(data, rows, d, done, op, partial.data());
    }
  }
  if (done < d) {
    for (std::size_t i = 0; i < rows; ++i) {
      double* p = partial.data() + (i % 4) * d;
      for (std::size_t j = done; j < d; ++j) p[j] += op.scalar(data[i * d + j], j);
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    sums[j] = (partial[j] + partial[d + j]) +
              (partial[2 * d + j] + partial[3 * d + j]);
  }
}

// Broadcast per-coordinate constants into the lane layout for this d.
__m256d LaneConstants(const double* values, std::size_t d, std::size_t j0) {
  if (d == 1) return _mm256_set1_pd(values[0]);
  if (d == 2) return _mm256_setr_pd(values[0], values[1], values[0], values[1]);
  return _mm256_loadu_pd(values + j0);
}

void ClippedColumnSums(const double* data, std::size_t rows, std::size_t d,
                       const double* lo, const double* hi, double* sums) {
  if (d <= 2) {
    const ClipOp op{LaneConstants(lo, d, 0), LaneConstants(hi, d, 0), lo, hi};
    ColumnSums(data, rows, d, op, sums);
    return;
  }
  // Wide layout: the clip bounds change per column block, so reduce block by
  // block with their own lane constants.
  std::vector<double> partial(4 * d, 0.0);
  std::size_t done = 0;
  for (; done + 4 <= d; done += 4) {
    const ClipOp op{LaneConstants(lo, d, done), LaneConstants(hi, d, done), lo,
                    hi};
    ColumnSumsWide(data, rows, d, done, op, partial.data());
  }
  for (std::size_t i = 0; i < rows; ++i) {
    double* p = partial.data() + (i % 4) * d;
    for (std::size_t j = done; j < d; ++j) {
      p[j] += std::min(hi[j], std::max(lo[j], data[i * d + j]));
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    sums[j] = (partial[j] + partial[d + j]) +
              (partial[2 * d + j] + partial[3 * d + j]);
  }
}

void SmoothedPhiColumnSums(const double* data, std::size_t rows, std::size_t d,
                           double tau, double c, double* sums) {
  const SmoothingConstants k(tau, c);
  const SmoothedOp op(&k);
  ColumnSums(data, rows, d, op, sums);
}

void Residuals(const double* w, const double* data, std::size_t rows,
               std::size_t d, double* out) {
  const std::size_t total = rows * d;
  if (d == 1 || d == 2 || d % 4 == 0) {
    std::size_t idx = 0;
    if (d % 4 == 0) {
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < d; j += 4) {
          const std::size_t at = i * d + j;
          _mm256_storeu_pd(out + at, _mm256_sub_pd(_mm256_loadu_pd(w + j),
                                                   _mm256_loadu_pd(data + at)));
        }
      }
      return;
    }
    const __m256d wv = LaneConstants(w, d, 0);
    for (; idx + 4 <= total; idx += 4) {
      _mm256_storeu_pd(out + idx,
                       _mm256_sub_pd(wv, _mm256_loadu_pd(data + idx)));
    }
    for (; idx < total; ++idx) out[idx] = w[idx % d] - data[idx];
    return;
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = w[j] - data[i * d + j];
  }
}

}  // namespace

const KernelTable& Avx2Table() {
  static const KernelTable table{"avx2", &ClippedColumnSums,
                                 &SmoothedPhiColumnSums, &Residuals};
  return table;
}

}  // namespace htdp::kernels
