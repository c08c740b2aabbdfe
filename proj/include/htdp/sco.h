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

// Projected gradient descent where each gradient is produced by a (private)
// mean-estimation oracle over per-sample gradients, plus the three zCDP
// drivers that fix tau, T and eta from n, d, rho and the loss constants.

#ifndef HTDP_SCO_H_
#define HTDP_SCO_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htdp/core.h"
#include "htdp/meanest.h"
#include "htdp/privacy.h"

namespace htdp {

struct LossConstants {
  double smoothness = 1.0;           // L
  double strong_convexity = 0.0;     // lambda; 0 when merely convex
  double diameter = 2.0;             // M of the constraint set
  double gradient_mean_bound = 1.0;  // R: ||E grad l(w, x)|| <= R on W
  MomentSpec moment;
};

class LossOracle {
 public:
  explicit LossOracle(LossConstants constants);
  virtual ~LossOracle() = default;

  virtual std::string name() const = 0;
  // Dimension of w for samples of the given dimension.
  virtual std::size_t ParameterDim(std::size_t sample_dim) const {
    return sample_dim;
  }
  virtual double Value(std::span<const double> w,
                       std::span<const double> x) const = 0;
  virtual void Gradient(std::span<const double> w, std::span<const double> x,
                        std::span<double> out) const = 0;
  // Row i of out (row length ParameterDim) is the gradient at sample i.
  virtual void Gradients(std::span<const double> w, SampleView samples,
                         std::span<double> out) const;

  const LossConstants& constants() const { return constants_; }

 private:
  LossConstants constants_;
};

// Euclidean ball; the constraint set of every driver.
struct Ball {
  std::vector<double> center;
  double radius = 1.0;

  Ball(std::vector<double> c, double r);
  double diameter() const { return 2.0 * radius; }
  bool Contains(std::span<const double> w, double slack = 1e-12) const;
};

std::vector<double> ProjectBall(std::span<const double> theta, const Ball& ball);

// Maps the gradient multiset of step t (1-based) to an estimate of its mean.
using MeanOracle = std::function<MeanEstimate(
    SampleView gradients, std::int64_t step, RngStream& rng)>;

// Column means, no noise.
MeanOracle ExactMeanOracle();
// Private oracles spending StepBudget(rho, steps, t) at step t.
MeanOracle CdpHdmeOracle(HdmeConfig cfg, double rho, std::int64_t steps);
MeanOracle CdpNsmeOracle(NsmeConfig cfg, double rho, std::int64_t steps,
                         Calibration calibration);

enum class ScoMode { kConvex, kStronglyConvex };

// Constant step size; the only schedule the drivers use.
class StepSchedule {
 public:
  static StepSchedule Constant(double eta);
  double at(std::int64_t step) const;

 private:
  explicit StepSchedule(double eta) : eta_(eta) {}
  double eta_;
};

struct Trajectory {
  // w^0 ... w^T.
  std::vector<std::vector<double>> iterates;
  // Oracle output at step t (index t-1).
  std::vector<std::vector<double>> gradient_estimates;
  // One charge per private step; empty for noiseless oracles.
  BudgetLedger ledger;

  std::int64_t steps() const {
    return static_cast<std::int64_t>(gradient_estimates.size());
  }
  // (1/T) sum_{t=1..T} w^t.
  std::vector<double> Average() const;
  const std::vector<double>& Last() const { return iterates.back(); }
};

// Projected gradient descent over the oracle. Convex mode hands the whole
// dataset to every step; strongly convex mode hands step t the contiguous
// rows [(t-1) b, t b) with b = floor(n / T).
Trajectory Scof(SampleView samples, const LossOracle& loss, const Ball& ball,
                const MeanOracle& oracle, const StepSchedule& eta,
                std::int64_t steps, ScoMode mode, std::span<const double> w0,
                RngStream& rng);

struct ScoOptions {
  double beta = 0.1;
  double smoothing_variance = 1.0;
  Calibration calibration = Calibration::kExact;
  std::int64_t max_steps = 1'000'000;
  // Starting point; the ball centre when unset.
  std::optional<std::vector<double>> w0;
};

struct ScoSchedule {
  double tau = 0.0;
  double tau_formula = 0.0;
  std::int64_t steps = 0;
  double steps_formula = 0.0;
  double eta = 0.0;
  // Strongly convex driver only: the oracle error target G at the chosen T.
  double g = 0.0;
  std::vector<std::string> warnings;
};

// tau = (sqrt(rho) n / (M d^{3/2}))^{1/k}, T = R^2 rho n^2 / (tau^2 d^4),
// eta = M / (R sqrt(T)).
ScoSchedule ConvexHdmeSchedule(std::size_t n, std::size_t d, double rho,
                               const LossConstants& c, const ScoOptions& opt);

// tau = (sqrt(rho) n / (M d^q))^{1/2}, T = R^2 rho n^2 / (tau^2 d^2),
// eta = M / (R sqrt(T)).
ScoSchedule ConvexNsmeSchedule(std::size_t n, std::size_t d, double rho,
                               double q, const LossConstants& c,
                               const ScoOptions& opt);

// T solves T = log((lambda+L) G(T) / (lambda L)) / log((lambda^2 + L^2 +
// lambda L) / (lambda+L)^2), where G(T) is the oracle error bound
// log(n) log(d+1) (sqrt(d/n') + sqrt(d) (sqrt(d) / (sqrt(rho') n'))^{(k-1)/k})
// at the per-step sample size n' = n/T and budget rho' = rho/T.
// eta = 1/(lambda + L), tau = (sqrt(rho) n / (sqrt(d) T^{3/2}))^{1/k}.
ScoSchedule StronglyConvexSchedule(std::size_t n, std::size_t d, double rho,
                                   const LossConstants& c,
                                   const ScoOptions& opt);

struct ScoResult {
  std::vector<double> w_priv;
  Trajectory trajectory;
  BudgetLedger ledger;
  ScoSchedule schedule;
};

ScoResult CdpScoConvexHdme(SampleView samples, const LossOracle& loss,
                           const Ball& ball, double rho, RngStream& rng,
                           const ScoOptions& opt = {});

ScoResult CdpScoConvexNsme(SampleView samples, const LossOracle& loss,
                           const Ball& ball, double rho, double q,
                           RngStream& rng, const ScoOptions& opt = {});

ScoResult CdpScoStronglyConvex(SampleView samples, const LossOracle& loss,
                               const Ball& ball, double rho, RngStream& rng,
                               const ScoOptions& opt = {});

struct RiskEstimate {
  double value;
  double std_error;
};

// Monte Carlo estimate of L(w) - L(w_star) on held-out samples.
RiskEstimate ExcessRisk(const LossOracle& loss, SampleView test,
                        std::span<const double> w,
                        std::span<const double> w_star);

}  // namespace htdp

#endif  // HTDP_SCO_H_
