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

#include "htdp/meanest.h"

#include <algorithm>
#include <cmath>

#include "htdp/kernels.h"

namespace htdp {

std::size_t HdmeBatchCount(double beta, std::size_t d) {
  if (!(beta > 0 && beta < 1)) throw UsageError("beta must lie in (0,1)");
  if (d < 1) throw UsageError("dimension must be >= 1");
  const double m = std::ceil(4.0 * std::log(2.0 * static_cast<double>(d) / beta));
  return static_cast<std::size_t>(std::max(1.0, m));
}

std::size_t HdmeConfig::BatchCount(std::size_t d) const {
  return batches != 0 ? batches : HdmeBatchCount(beta, d);
}

void HdmeConfig::Validate() const {
  if (!(tau > 0) || !std::isfinite(tau)) throw UsageError("tau must be positive");
  if (batches == 0 && !(beta > 0 && beta < 1)) {
    throw UsageError("beta must lie in (0,1)");
  }
  if (!std::isfinite(center)) throw UsageError("clip center must be finite");
}

const char* CalibrationName(Calibration c) {
  return c == Calibration::kPaper ? "paper" : "exact";
}

Calibration ParseCalibration(const std::string& name) {
  if (name == "paper") return Calibration::kPaper;
  if (name == "exact") return Calibration::kExact;
  throw UsageError("unknown calibration mode: " + name);
}

void NsmeConfig::Validate() const {
  if (!(tau > 0) || !std::isfinite(tau)) throw UsageError("tau must be positive");
  if (!(smoothing_variance >= 0) || !std::isfinite(smoothing_variance)) {
    throw UsageError("smoothing variance c must be nonnegative");
  }
  if (quadrature_nodes < 1) throw UsageError("quadrature needs >= 1 node");
}

MeanEstimate Hdme(SampleView samples, const HdmeConfig& cfg) {
  cfg.Validate();
  const std::size_t n = samples.n();
  const std::size_t d = samples.d();
  const std::size_t m = cfg.BatchCount(d);
  if (n < m) {
    throw UsageError("fewer samples than batches (beta too small for n)");
  }
  const std::vector<double> lo(d, cfg.center - 3.0 * cfg.tau);
  const std::vector<double> hi(d, cfg.center + 3.0 * cfg.tau);
  const kernels::KernelTable& k = kernels::Active();

  // batch_means[j * m + b]
  std::vector<double> batch_means(d * m);
  std::vector<double> sums(d);
  const auto ranges = BatchRanges(n, m);
  for (std::size_t b = 0; b < m; ++b) {
    const RowRange& r = ranges[b];
    k.clipped_column_sums(samples.values().data() + r.begin * d, r.size(), d,
                          lo.data(), hi.data(), sums.data());
    const double size = static_cast<double>(r.size());
    // The clamp only absorbs rounding in the average of clipped values.
    for (std::size_t j = 0; j < d; ++j) {
      batch_means[j * m + b] = std::clamp(sums[j] / size, lo[j], hi[j]);
    }
  }

  MeanEstimate est;
  est.value.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    est.value[j] = Median(std::span<const double>(batch_means).subspan(j * m, m));
  }
  est.tau_used = cfg.tau;
  est.batches_used = m;
  return est;
}

Sensitivity HdmeSensitivity(const HdmeConfig& cfg, std::size_t n,
                            std::size_t d) {
  cfg.Validate();
  const std::size_t m = cfg.BatchCount(d);
  if (n < m) throw UsageError("fewer samples than batches");
  const double smallest = static_cast<double>(n / m);
  const double per_coordinate = 6.0 * cfg.tau / smallest;
  return {per_coordinate * static_cast<double>(d),
          per_coordinate * std::sqrt(static_cast<double>(d))};
}

MeanEstimate CdpHdme(SampleView samples, const HdmeConfig& cfg, double rho,
                     RngStream& rng) {
  if (!(rho > 0)) throw UsageError("rho must be positive");
  MeanEstimate est = Hdme(samples, cfg);
  const Sensitivity s = HdmeSensitivity(cfg, samples.n(), samples.d());
  // Variance 36 tau^2 m^2 d / (rho n^2) = l2^2 / rho, i.e. the Gaussian
  // mechanism run at rho / 2.
  est.value = GaussianMechanism(est.value, s.l2, 0.5 * rho, rng);
  est.noise_sigma = std::sqrt(GaussianVariance(s.l2, 0.5 * rho));
  est.noise_kind = "gaussian";
  est.budget_spent = PrivacyBudget::Concentrated(rho);
  return est;
}

MeanEstimate DpHdme(SampleView samples, const HdmeConfig& cfg, double epsilon,
                    RngStream& rng) {
  if (!(epsilon > 0)) throw UsageError("epsilon must be positive");
  MeanEstimate est = Hdme(samples, cfg);
  const Sensitivity s = HdmeSensitivity(cfg, samples.n(), samples.d());
  est.value = LaplaceMechanism(est.value, s.l1, epsilon, rng);
  est.noise_sigma = LaplaceScale(s.l1, epsilon);
  est.noise_kind = "laplace";
  est.budget_spent = PrivacyBudget::Pure(epsilon);
  return est;
}

MeanEstimate Nsme(SampleView samples, const NsmeConfig& cfg) {
  cfg.Validate();
  const std::size_t n = samples.n();
  const std::size_t d = samples.d();
  if (n < 1) throw UsageError("nsme needs at least one sample");
  std::vector<double> sums(d, 0.0);
  if (cfg.use_quadrature) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        sums[j] += SmoothedPhiQuadrature(samples.at(i, j), cfg.tau,
                                         cfg.smoothing_variance,
                                         cfg.quadrature_nodes);
      }
    }
  } else {
    kernels::Active().smoothed_phi_column_sums(samples.values().data(), n, d,
                                               cfg.tau, cfg.smoothing_variance,
                                               sums.data());
  }
  MeanEstimate est;
  est.value.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double bound = cfg.tau * kPhiBound;
    est.value[j] = std::clamp(cfg.tau * sums[j] / static_cast<double>(n), -bound, bound);
  }
  est.tau_used = cfg.tau;
  return est;
}

double NsmeSensitivity(double tau, std::size_t n, std::size_t d) {
  if (!(tau > 0)) throw UsageError("tau must be positive");
  if (n < 1) throw UsageError("n must be >= 1");
  return 2.0 * kPhiBound * tau * std::sqrt(static_cast<double>(d)) /
         static_cast<double>(n);
}

MeanEstimate CdpNsme(SampleView samples, const NsmeConfig& cfg, double rho,
                     RngStream& rng, Calibration calibration) {
  if (!(rho > 0)) throw UsageError("rho must be positive");
  MeanEstimate est = Nsme(samples, cfg);
  const double n = static_cast<double>(samples.n());
  const double d = static_cast<double>(samples.d());
  double variance;
  if (calibration == Calibration::kPaper) {
    variance = cfg.tau * cfg.tau * d / (rho * n * n);
  } else {
    variance = GaussianVariance(NsmeSensitivity(cfg.tau, samples.n(), samples.d()), rho);
  }
  const double sigma = std::sqrt(variance);
  for (double& v : est.value) v += sigma * rng.Normal();
  est.noise_sigma = sigma;
  est.noise_kind = "gaussian";
  est.calibration = calibration;
  est.budget_spent = PrivacyBudget::Concentrated(rho);
  return est;
}

TauRule ParseTauRule(const std::string& name) {
  if (name == "cdp_hdme") return TauRule::kCdpHdme;
  if (name == "dp_hdme") return TauRule::kDpHdme;
  if (name == "sco_convex_hdme") return TauRule::kScoConvexHdme;
  if (name == "sco_convex_nsme") return TauRule::kScoConvexNsme;
  if (name == "sco_strongly_convex") return TauRule::kScoStronglyConvex;
  throw UsageError("unknown tau rule: " + name);
}

TauChoice RecommendedTau(TauRule rule, const TauParams& p) {
  if (!(p.n > 0) || !(p.d > 0)) throw UsageError("n and d must be positive");
  if (!(p.k >= 2)) throw UsageError("moment order k must be >= 2");
  auto need = [](double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw UsageError(std::string(what) + " must be positive");
    }
  };
  double value = 0.0;
  switch (rule) {
    case TauRule::kCdpHdme:
      need(p.rho, "rho");
      value = std::pow(std::sqrt(p.rho) * p.n / std::sqrt(p.d), 1.0 / p.k);
      break;
    case TauRule::kDpHdme:
      need(p.epsilon, "epsilon");
      value = std::pow(p.epsilon * p.n / p.d, 1.0 / p.k);
      break;
    case TauRule::kScoConvexHdme:
      need(p.rho, "rho");
      need(p.diameter, "diameter M");
      value = std::pow(std::sqrt(p.rho) * p.n / (p.diameter * std::pow(p.d, 1.5)),
                       1.0 / p.k);
      break;
    case TauRule::kScoConvexNsme:
      need(p.rho, "rho");
      need(p.diameter, "diameter M");
      if (!(p.q >= 0.5 && p.q <= 2.0)) throw UsageError("q must lie in [0.5, 2]");
      value = std::sqrt(std::sqrt(p.rho) * p.n / (p.diameter * std::pow(p.d, p.q)));
      break;
    case TauRule::kScoStronglyConvex:
      need(p.rho, "rho");
      need(p.steps, "T");
      value = std::pow(std::sqrt(p.rho) * p.n /
                           (std::sqrt(p.d) * std::pow(p.steps, 1.5)),
                       1.0 / p.k);
      break;
  }
  const bool floored = !(value >= kTauFloor);
  return {floored ? kTauFloor : value, value, floored};
}

}  // namespace htdp
