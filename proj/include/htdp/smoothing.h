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

// Catoni-type influence function and its Gaussian-smoothed version used by the
// noise-smoothing mean estimator.

#ifndef HTDP_SMOOTHING_H_
#define HTDP_SMOOTHING_H_

#include <cmath>

namespace htdp {

inline constexpr double kSqrt2 = 1.41421356237309504880;
// sup |phi| = 2 sqrt(2) / 3.
inline constexpr double kPhiBound = 2.0 * kSqrt2 / 3.0;

// phi(x) = x - x^3/6 on [-sqrt2, sqrt2], saturating at +-2sqrt2/3 outside.
inline double CatoniPhi(double x) {
  if (x > kSqrt2) return kPhiBound;
  if (x < -kSqrt2) return -kPhiBound;
  return x - x * x * x / 6.0;
}

// Per-call constants of the smoothed influence function.
struct SmoothingConstants {
  SmoothingConstants(double tau, double c);

  double tau;
  double inv_tau;
  double c;
  double sqrt_c;
  // E[Y^3] = a^3 (1 + 3c) for Y ~ N(a, a^2 c); this holds (1 + 3c) / 6.
  double cubic_sixth;
  // The polynomial fast path applies when |a| * fast_factor < sqrt2: the
  // Gaussian is then at least ten standard deviations from +-sqrt2, and the
  // mass it leaves outside (about 1e-23) is far below the rounding of the
  // result.
  double fast_factor;
};

// Fast path shared with the SIMD kernels; the arithmetic order here is the
// reference the vector code reproduces.
inline bool SmoothedPhiFastPath(double x, const SmoothingConstants& k,
                                double* value) {
  const double a = x * k.inv_tau;
  if (!(std::abs(a) * k.fast_factor < kSqrt2)) return false;
  const double a2 = a * a;
  const double a3 = a2 * a;
  *value = a - a3 * k.cubic_sixth;
  return true;
}

// E_{N ~ N(0,c)}[phi(x (1 + N) / tau)] in closed form.
double SmoothedPhi(double x, double tau, double c);
double SmoothedPhi(double x, const SmoothingConstants& k);

// Same expectation by Gauss-Hermite quadrature with the given node count.
// Converges slowly because phi is only C^1 at +-sqrt2; kept as a secondary
// evaluator.
double SmoothedPhiQuadrature(double x, double tau, double c, int nodes);

}  // namespace htdp

#endif  // HTDP_SMOOTHING_H_
