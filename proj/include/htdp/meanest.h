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

// Heavy-tailed mean estimators.
//
//  * Hdme: coordinate-wise median of m contiguous batch means of samples
//    clipped to [center - 3 tau, center + 3 tau].
//  * CdpHdme / DpHdme: Hdme plus Gaussian (zCDP) or Laplace (pure DP) noise.
//  * Nsme / CdpNsme: average of a Gaussian-smoothed Catoni influence function,
//    with Gaussian noise.

#ifndef HTDP_MEANEST_H_
#define HTDP_MEANEST_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "htdp/core.h"
#include "htdp/privacy.h"
#include "htdp/smoothing.h"

namespace htdp {

// ceil(4 log(2d / beta)).
std::size_t HdmeBatchCount(double beta, std::size_t d);

struct HdmeConfig {
  double tau = 10.0;
  // Failure probability; determines the batch count.
  double beta = 0.1;
  // Clip centre, applied to every coordinate.
  double center = 0.0;
  // Overrides the beta-derived batch count when nonzero.
  std::size_t batches = 0;

  std::size_t BatchCount(std::size_t d) const;
  void Validate() const;
};

enum class Calibration { kPaper, kExact };

const char* CalibrationName(Calibration c);
Calibration ParseCalibration(const std::string& name);

struct NsmeConfig {
  double tau = 10.0;
  // Variance of the multiplicative smoothing noise.
  double smoothing_variance = 1.0;
  // Only used by the quadrature evaluator.
  int quadrature_nodes = 64;
  bool use_quadrature = false;

  void Validate() const;
};

struct MeanEstimate {
  std::vector<double> value;
  double tau_used = 0.0;
  std::size_t batches_used = 0;
  std::optional<PrivacyBudget> budget_spent;
  // Per-coordinate noise standard deviation (Gaussian) or scale (Laplace).
  double noise_sigma = 0.0;
  std::string noise_kind = "none";
  std::optional<Calibration> calibration;
};

MeanEstimate Hdme(SampleView samples, const HdmeConfig& cfg);

// Per-coordinate sensitivity 6 tau / b_min, where b_min is the smallest batch
// (n/m when m divides n): l1 = 6 tau d / b_min, l2 = 6 tau sqrt(d) / b_min.
Sensitivity HdmeSensitivity(const HdmeConfig& cfg, std::size_t n,
                            std::size_t d);

// Gaussian noise with per-coordinate variance 36 tau^2 m^2 d / (rho n^2).
MeanEstimate CdpHdme(SampleView samples, const HdmeConfig& cfg, double rho,
                     RngStream& rng);

// Laplace noise with per-coordinate scale 6 tau m d / (epsilon n).
MeanEstimate DpHdme(SampleView samples, const HdmeConfig& cfg, double epsilon,
                    RngStream& rng);

MeanEstimate Nsme(SampleView samples, const NsmeConfig& cfg);

// l2 sensitivity of Nsme from sup|phi| = 2 sqrt(2)/3: (4 sqrt2 / 3) tau sqrt(d)/n.
double NsmeSensitivity(double tau, std::size_t n, std::size_t d);

// kPaper: per-coordinate variance tau^2 d / (rho n^2).
// kExact: Gaussian mechanism on NsmeSensitivity.
MeanEstimate CdpNsme(SampleView samples, const NsmeConfig& cfg, double rho,
                     RngStream& rng, Calibration calibration);

enum class TauRule {
  kCdpHdme,
  kDpHdme,
  kScoConvexHdme,
  kScoConvexNsme,
  kScoStronglyConvex,
};

TauRule ParseTauRule(const std::string& name);

struct TauParams {
  double rho = 0.0;      // zCDP rules
  double epsilon = 0.0;  // kDpHdme
  double n = 0.0;
  double d = 0.0;
  double k = 2.0;
  double diameter = 0.0;  // M, SCO convex rules
  double q = 0.0;         // kScoConvexNsme
  double steps = 0.0;     // T, kScoStronglyConvex
};

struct TauChoice {
  double tau;
  double formula_value;
  bool floored;
};

inline constexpr double kTauFloor = 10.0;

// The rule's truncation scale, floored at kTauFloor.
TauChoice RecommendedTau(TauRule rule, const TauParams& p);

}  // namespace htdp

#endif  // HTDP_MEANEST_H_
