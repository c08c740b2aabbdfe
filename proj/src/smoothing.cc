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

#include "htdp/smoothing.h"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "htdp/core.h"

namespace htdp {
namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double StdNormalPdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Upper tail P(Z > z).
double UpperTail(double z) { return 0.5 * std::erfc(z / kSqrt2); }

// Lower tail P(Z < z).
double LowerTail(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

// P(zl <= Z <= zu) without cancelling two numbers close to one.
double Mass(double zl, double zu) {
  if (zl > 0) return UpperTail(zl) - UpperTail(zu);
  if (zu < 0) return LowerTail(zu) - LowerTail(zl);
  return 1.0 - UpperTail(zu) - LowerTail(zl);
}

struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite nodes/weights for weight exp(-t^2), by Newton iteration on
// the orthonormal recurrence.
// Orthonormal Hermite recurrence: returns p_n(z) and sets *deriv to p_n'(z).
double HermiteValue(int n, double z, double* deriv) {
  double p1 = std::pow(std::numbers::pi, -0.25);
  double p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / (j + 1)) * p2 -
         std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
  }
  *deriv = std::sqrt(2.0 * n) * p2;
  return p1;
}

// Roots bracketed by sign changes on a grid finer than the smallest node
// gap, then refined by safeguarded Newton steps.
HermiteRule ComputeHermiteRule(int n) {
  HermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const double zmax = std::sqrt(2.0 * n + 1) + 1.0;
  const double h = 0.1 * std::numbers::pi / std::sqrt(2.0 * n + 1);
  std::vector<double> weights;
  double dp = 0.0;
  if (n % 2 == 1) {
    HermiteValue(n, 0.0, &dp);
    rule.weights[n / 2] = 2.0 / (dp * dp);
  }
  double lo = 0.5 * h;
  double flo = HermiteValue(n, lo, &dp);
  std::vector<double> positive;
  while (lo < zmax && static_cast<int>(positive.size()) < n / 2) {
    const double hi = lo + h;
    const double fhi = HermiteValue(n, hi, &dp);
    if ((flo < 0) != (fhi < 0)) {
      double a = lo, b = hi, fa = flo;
      double z = 0.5 * (a + b);
      for (int iter = 0; iter < 200; ++iter) {
        const double f = HermiteValue(n, z, &dp);
        if ((f < 0) == (fa < 0)) {
          a = z;
          fa = f;
        } else {
          b = z;
        }
        double next = z - f / dp;
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - z) <= 1e-15 * std::max(1.0, std::abs(z))) {
          z = next;
          break;
        }
        z = next;
      }
      HermiteValue(n, z, &dp);
      positive.push_back(z);
      weights.push_back(2.0 / (dp * dp));
    }
    lo = hi;
    flo = fhi;
  }
  const int half = n / 2;
  for (int i = 0; i < half && i < static_cast<int>(positive.size()); ++i) {
    const double w = weights[i];
    rule.nodes[n - half + i] = positive[i];
    rule.weights[n - half + i] = w;
    rule.nodes[half - 1 - i] = -positive[i];
    rule.weights[half - 1 - i] = w;
  }
  return rule;
}

const HermiteRule& CachedHermiteRule(int n) {
  static std::mutex mu;
  static std::map<int, HermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, ComputeHermiteRule(n)).first;
  return it->second;
}

}  // namespace

SmoothingConstants::SmoothingConstants(double tau_in, double c_in)
    : tau(tau_in), c(c_in) {
  if (!(tau > 0)) throw UsageError("smoothing scale tau must be positive");
  if (!(c >= 0)) throw UsageError("smoothing variance c must be nonnegative");
  inv_tau = 1.0 / tau;
  sqrt_c = std::sqrt(c);
  cubic_sixth = (1.0 + 3.0 * c) / 6.0;
  fast_factor = 1.0 + 10.0 * sqrt_c;
}

double SmoothedPhi(double x, double tau, double c) {
  return SmoothedPhi(x, SmoothingConstants(tau, c));
}

double SmoothedPhi(double x, const SmoothingConstants& k) {
  double fast;
  if (SmoothedPhiFastPath(x, k, &fast)) return fast;
  const double a = x / k.tau;
  if (k.c == 0.0) return CatoniPhi(a);

  // Y = a (1 + N) ~ N(m, s^2). E[phi(Y)] splits into the cubic piece on
  // [-sqrt2, sqrt2] and the two saturated tails.
  const double m = a;
  const double s = std::abs(a) * k.sqrt_c;
  const double zu = (kSqrt2 - m) / s;
  const double zl = (-kSqrt2 - m) / s;
  const double upper = UpperTail(zu);
  const double lower = LowerTail(zl);

  const double tails = kPhiBound * (upper - lower);

  if (s > 0.5) {
    // The window is under six standard deviations wide, where the moment
    // recurrence below loses digits to the s^2 factors. A fixed
    // Gauss-Legendre rule on the window is exact to rounding here.
    const double inv_s = 1.0 / s;
    auto f = [&](double y) {
      const double z = (y - m) * inv_s;
      return (y - y * y * y / 6.0) * StdNormalPdf(z) * inv_s;
    };
    using Rule = boost::math::quadrature::gauss<double, 32>;
    return Rule::integrate(f, -kSqrt2, kSqrt2) + tails;
  }

  // Partial moments I_p = E[Y^p; |Y| <= sqrt2] via integration by parts:
  // I_p = m I_{p-1} + s^2 (p-1) I_{p-2} - s^2 [y^{p-1} g(y)]_{-sqrt2}^{sqrt2},
  // with s^2 g(y) = s * pdf(z).
  const double hu = s * StdNormalPdf(zu);
  const double hl = s * StdNormalPdf(zl);
  const double s2 = s * s;
  const double i0 = Mass(zl, zu);
  const double i1 = m * i0 - (hu - hl);
  const double i2 = m * i1 + s2 * i0 - kSqrt2 * (hu + hl);
  const double i3 = m * i2 + 2.0 * s2 * i1 - 2.0 * (hu - hl);
  return (i1 - i3 / 6.0) + tails;
}

double SmoothedPhiQuadrature(double x, double tau, double c, int nodes) {
  const SmoothingConstants k(tau, c);
  if (nodes < 1) throw UsageError("quadrature needs at least one node");
  const double a = x / tau;
  if (c == 0.0) return CatoniPhi(a);
  const HermiteRule& rule = CachedHermiteRule(nodes);
  const double scale = std::sqrt(2.0 * c);
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    sum += rule.weights[i] * CatoniPhi(a * (1.0 + scale * rule.nodes[i]));
  }
  return sum / std::sqrt(std::numbers::pi);
}

}  // namespace htdp
