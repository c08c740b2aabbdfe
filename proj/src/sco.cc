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

#include "htdp/sco.h"

#include <algorithm>
#include <cmath>

namespace htdp {
namespace {

void ValidateConstants(const LossConstants& c) {
  c.moment.Validate();
  if (!(c.smoothness >= 0)) throw UsageError("smoothness L must be >= 0");
  if (!(c.strong_convexity >= 0)) throw UsageError("lambda must be >= 0");
  if (c.strong_convexity > c.smoothness) throw UsageError("lambda exceeds L");
  if (!(c.diameter > 0)) throw UsageError("diameter M must be positive");
  if (!(c.gradient_mean_bound > 0)) throw UsageError("R must be positive");
}

std::int64_t ClampSteps(double formula, std::int64_t max_steps,
                        std::vector<std::string>& warnings) {
  if (!(formula >= 1.0)) {
    warnings.emplace_back("T_clamped_to_1");
    return 1;
  }
  if (formula > static_cast<double>(max_steps)) {
    warnings.emplace_back("T_capped");
    return max_steps;
  }
  return static_cast<std::int64_t>(std::floor(formula));
}

std::vector<double> StartPoint(const Ball& ball, const ScoOptions& opt) {
  std::vector<double> w0 = opt.w0.value_or(ball.center);
  if (w0.size() != ball.center.size()) throw UsageError("w0 dimension mismatch");
  if (!ball.Contains(w0)) throw UsageError("w0 must lie in the constraint set");
  return w0;
}

}  // namespace

LossOracle::LossOracle(LossConstants constants) : constants_(constants) {
  ValidateConstants(constants_);
}

void LossOracle::Gradients(std::span<const double> w, SampleView samples,
                           std::span<double> out) const {
  const std::size_t p = w.size();
  for (std::size_t i = 0; i < samples.n(); ++i) {
    Gradient(w, samples.row(i), out.subspan(i * p, p));
  }
}

Ball::Ball(std::vector<double> c, double r) : center(std::move(c)), radius(r) {
  if (!(radius > 0)) throw UsageError("ball radius must be positive");
  if (center.empty()) throw UsageError("ball centre must be nonempty");
}

bool Ball::Contains(std::span<const double> w, double slack) const {
  double dist2 = 0.0;
  for (std::size_t j = 0; j < center.size(); ++j) {
    dist2 += (w[j] - center[j]) * (w[j] - center[j]);
  }
  return std::sqrt(dist2) <= radius * (1.0 + slack);
}

std::vector<double> ProjectBall(std::span<const double> theta,
                                const Ball& ball) {
  if (theta.size() != ball.center.size()) {
    throw UsageError("projection dimension mismatch");
  }
  std::vector<double> out(theta.begin(), theta.end());
  double dist2 = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double diff = out[j] - ball.center[j];
    dist2 += diff * diff;
  }
  const double dist = std::sqrt(dist2);
  if (dist <= ball.radius) return out;
  const double scale = ball.radius / dist;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = ball.center[j] + scale * (out[j] - ball.center[j]);
  }
  return out;
}

MeanOracle ExactMeanOracle() {
  return [](SampleView g, std::int64_t, RngStream&) {
    MeanEstimate est;
    est.value.assign(g.d(), 0.0);
    for (std::size_t i = 0; i < g.n(); ++i) {
      for (std::size_t j = 0; j < g.d(); ++j) est.value[j] += g.at(i, j);
    }
    for (double& v : est.value) v /= static_cast<double>(g.n());
    return est;
  };
}

MeanOracle CdpHdmeOracle(HdmeConfig cfg, double rho, std::int64_t steps) {
  SplitBudget(rho, steps);
  return [cfg, rho, steps](SampleView g, std::int64_t t, RngStream& rng) {
    return CdpHdme(g, cfg, StepBudget(rho, steps, t), rng);
  };
}

MeanOracle CdpNsmeOracle(NsmeConfig cfg, double rho, std::int64_t steps,
                         Calibration calibration) {
  SplitBudget(rho, steps);
  return [cfg, rho, steps, calibration](SampleView g, std::int64_t t,
                                        RngStream& rng) {
    return CdpNsme(g, cfg, StepBudget(rho, steps, t), rng, calibration);
  };
}

StepSchedule StepSchedule::Constant(double eta) {
  if (!(eta > 0) || !std::isfinite(eta)) throw UsageError("eta must be positive");
  return StepSchedule(eta);
}

double StepSchedule::at(std::int64_t) const { return eta_; }

std::vector<double> Trajectory::Average() const {
  if (iterates.size() < 2) throw UsageError("trajectory has no steps");
  std::vector<double> avg(iterates.front().size(), 0.0);
  for (std::size_t t = 1; t < iterates.size(); ++t) {
    for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += iterates[t][j];
  }
  for (double& v : avg) v /= static_cast<double>(iterates.size() - 1);
  return avg;
}

Trajectory Scof(SampleView samples, const LossOracle& loss, const Ball& ball,
                const MeanOracle& oracle, const StepSchedule& eta,
                std::int64_t steps, ScoMode mode, std::span<const double> w0,
                RngStream& rng) {
  if (steps < 1) throw UsageError("T must be >= 1");
  const std::size_t n = samples.n();
  const std::size_t p = loss.ParameterDim(samples.d());
  if (w0.size() != p || ball.center.size() != p) {
    throw UsageError("parameter dimension mismatch");
  }
  if (!ball.Contains(w0)) throw UsageError("w0 must lie in the constraint set");
  std::size_t batch = n;
  if (mode == ScoMode::kStronglyConvex) {
    if (n < static_cast<std::size_t>(steps)) {
      throw UsageError("fewer samples than steps in strongly convex mode");
    }
    batch = n / static_cast<std::size_t>(steps);
  }

  Trajectory traj;
  traj.iterates.reserve(steps + 1);
  traj.gradient_estimates.reserve(steps);
  traj.iterates.emplace_back(w0.begin(), w0.end());
  std::vector<double> grads(batch * p);
  std::vector<double> theta(p);
  RngStream steps_rng = rng.Child("step");
  for (std::int64_t t = 1; t <= steps; ++t) {
    const std::vector<double>& w = traj.iterates.back();
    SampleView subset = samples;
    if (mode == ScoMode::kStronglyConvex) {
      const std::size_t begin = static_cast<std::size_t>(t - 1) * batch;
      subset = samples.rows(begin, begin + batch);
    }
    loss.Gradients(w, subset, grads);
    RngStream step_rng = steps_rng.Child(static_cast<std::uint64_t>(t));
    MeanEstimate g = oracle(SampleView(grads, subset.n(), p), t, step_rng);
    if (g.value.size() != p) throw UsageError("oracle returned wrong dimension");
    if (g.budget_spent) {
      traj.ledger.Charge("step " + std::to_string(t), *g.budget_spent);
    }
    const double step = eta.at(t - 1);
    for (std::size_t j = 0; j < p; ++j) theta[j] = w[j] - step * g.value[j];
    traj.iterates.push_back(ProjectBall(theta, ball));
    traj.gradient_estimates.push_back(std::move(g.value));
  }
  return traj;
}

ScoSchedule ConvexHdmeSchedule(std::size_t n, std::size_t d, double rho,
                               const LossConstants& c, const ScoOptions& opt) {
  ValidateConstants(c);
  if (!(rho > 0)) throw UsageError("rho must be positive");
  ScoSchedule s;
  TauParams tp;
  tp.rho = rho;
  tp.n = static_cast<double>(n);
  tp.d = static_cast<double>(d);
  tp.k = c.moment.k;
  tp.diameter = c.diameter;
  const TauChoice tau = RecommendedTau(TauRule::kScoConvexHdme, tp);
  if (tau.floored) s.warnings.emplace_back("tau_floored");
  s.tau = tau.tau;
  s.tau_formula = tau.formula_value;
  const double R = c.gradient_mean_bound;
  s.steps_formula = R * R * rho * tp.n * tp.n / (s.tau * s.tau * std::pow(tp.d, 4));
  s.steps = ClampSteps(s.steps_formula, opt.max_steps, s.warnings);
  s.eta = c.diameter / (R * std::sqrt(static_cast<double>(s.steps)));
  return s;
}

ScoSchedule ConvexNsmeSchedule(std::size_t n, std::size_t d, double rho,
                               double q, const LossConstants& c,
                               const ScoOptions& opt) {
  ValidateConstants(c);
  if (!(rho > 0)) throw UsageError("rho must be positive");
  if (!(q >= 0.5 && q <= 2.0)) throw UsageError("q must lie in [0.5, 2]");
  ScoSchedule s;
  TauParams tp;
  tp.rho = rho;
  tp.n = static_cast<double>(n);
  tp.d = static_cast<double>(d);
  tp.k = c.moment.k;
  tp.diameter = c.diameter;
  tp.q = q;
  const TauChoice tau = RecommendedTau(TauRule::kScoConvexNsme, tp);
  if (tau.floored) s.warnings.emplace_back("tau_floored");
  s.tau = tau.tau;
  s.tau_formula = tau.formula_value;
  const double R = c.gradient_mean_bound;
  s.steps_formula = R * R * rho * tp.n * tp.n / (s.tau * s.tau * tp.d * tp.d);
  s.steps = ClampSteps(s.steps_formula, opt.max_steps, s.warnings);
  s.eta = c.diameter / (R * std::sqrt(static_cast<double>(s.steps)));
  return s;
}

ScoSchedule StronglyConvexSchedule(std::size_t n, std::size_t d, double rho,
                                   const LossConstants& c,
                                   const ScoOptions& opt) {
  ValidateConstants(c);
  if (!(rho > 0)) throw UsageError("rho must be positive");
  const double lambda = c.strong_convexity;
  const double L = c.smoothness;
  if (!(lambda > 0)) throw UsageError("strongly convex driver needs lambda > 0");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double k = c.moment.k;
  const double polylog = std::log(nn) * std::log(dd + 1.0);
  auto g_at = [&](double steps) {
    const double n_step = nn / steps;
    const double rho_step = rho / steps;
    return polylog * (std::sqrt(dd / n_step) +
                      std::sqrt(dd) * std::pow(std::sqrt(dd) /
                                                   (std::sqrt(rho_step) * n_step),
                                               (k - 1.0) / k));
  };
  // Both logs must be negative for a positive T.
  const double contraction =
      std::log((lambda * lambda + L * L + lambda * L) / ((lambda + L) * (lambda + L)));
  auto ratio_at = [&](double steps) {
    return (lambda + L) * g_at(steps) / (lambda * L);
  };
  auto formula = [&](double steps) {
    return std::log(ratio_at(steps)) / contraction;
  };

  ScoSchedule s;
  if (!(ratio_at(1.0) < 1.0)) {
    s.warnings.emplace_back("T_fallback_log_n");
    s.steps_formula = std::ceil(std::log(nn));
  } else if (formula(1.0) <= 1.0) {
    s.steps_formula = formula(1.0);
  } else {
    // formula(T) - T is decreasing; formula is treated as -inf past the point
    // where the ratio reaches 1.
    double lo = 1.0;
    double hi = nn;
    for (int iter = 0; iter < 200 && hi - lo > 1e-9 * hi; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (ratio_at(mid) < 1.0 && formula(mid) > mid) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    s.steps_formula = lo;
  }
  double steps = std::ceil(s.steps_formula - 1e-9);
  if (steps < 1.0) {
    steps = 1.0;
  }
  if (steps > static_cast<double>(opt.max_steps)) {
    steps = static_cast<double>(opt.max_steps);
    s.warnings.emplace_back("T_capped");
  }
  if (steps > nn) {
    steps = nn;
    s.warnings.emplace_back("T_capped_at_n");
  }
  s.steps = static_cast<std::int64_t>(steps);
  s.g = g_at(steps);
  s.eta = 1.0 / (lambda + L);
  TauParams tp;
  tp.rho = rho;
  tp.n = nn;
  tp.d = dd;
  tp.k = k;
  tp.steps = steps;
  const TauChoice tau = RecommendedTau(TauRule::kScoStronglyConvex, tp);
  if (tau.floored) s.warnings.emplace_back("tau_floored");
  s.tau = tau.tau;
  s.tau_formula = tau.formula_value;
  return s;
}

ScoResult CdpScoConvexHdme(SampleView samples, const LossOracle& loss,
                           const Ball& ball, double rho, RngStream& rng,
                           const ScoOptions& opt) {
  const std::size_t p = loss.ParameterDim(samples.d());
  ScoResult r;
  r.schedule = ConvexHdmeSchedule(samples.n(), p, rho, loss.constants(), opt);
  HdmeConfig cfg;
  cfg.tau = r.schedule.tau;
  cfg.beta = opt.beta;
  const auto w0 = StartPoint(ball, opt);
  r.trajectory = Scof(samples, loss, ball, CdpHdmeOracle(cfg, rho, r.schedule.steps),
                      StepSchedule::Constant(r.schedule.eta), r.schedule.steps,
                      ScoMode::kConvex, w0, rng);
  r.w_priv = r.trajectory.Average();
  r.ledger = r.trajectory.ledger;
  return r;
}

ScoResult CdpScoConvexNsme(SampleView samples, const LossOracle& loss,
                           const Ball& ball, double rho, double q,
                           RngStream& rng, const ScoOptions& opt) {
  const std::size_t p = loss.ParameterDim(samples.d());
  ScoResult r;
  r.schedule = ConvexNsmeSchedule(samples.n(), p, rho, q, loss.constants(), opt);
  NsmeConfig cfg;
  cfg.tau = r.schedule.tau;
  cfg.smoothing_variance = opt.smoothing_variance;
  const auto w0 = StartPoint(ball, opt);
  r.trajectory =
      Scof(samples, loss, ball, CdpNsmeOracle(cfg, rho, r.schedule.steps, opt.calibration),
           StepSchedule::Constant(r.schedule.eta), r.schedule.steps,
           ScoMode::kConvex, w0, rng);
  r.w_priv = r.trajectory.Average();
  r.ledger = r.trajectory.ledger;
  return r;
}

ScoResult CdpScoStronglyConvex(SampleView samples, const LossOracle& loss,
                               const Ball& ball, double rho, RngStream& rng,
                               const ScoOptions& opt) {
  const std::size_t p = loss.ParameterDim(samples.d());
  ScoResult r;
  r.schedule = StronglyConvexSchedule(samples.n(), p, rho, loss.constants(), opt);
  HdmeConfig cfg;
  cfg.tau = r.schedule.tau;
  cfg.beta = opt.beta;
  const std::size_t batch = samples.n() / static_cast<std::size_t>(r.schedule.steps);
  if (batch < cfg.BatchCount(p)) {
    throw UsageError("per-step batch too small for the mean oracle");
  }
  const auto w0 = StartPoint(ball, opt);
  r.trajectory = Scof(samples, loss, ball, CdpHdmeOracle(cfg, rho, r.schedule.steps),
                      StepSchedule::Constant(r.schedule.eta), r.schedule.steps,
                      ScoMode::kStronglyConvex, w0, rng);
  r.w_priv = r.trajectory.Last();
  r.ledger = r.trajectory.ledger;
  return r;
}

RiskEstimate ExcessRisk(const LossOracle& loss, SampleView test,
                        std::span<const double> w,
                        std::span<const double> w_star) {
  if (test.n() < 1) throw UsageError("empty test set");
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < test.n(); ++i) {
    const double diff = loss.Value(w, test.row(i)) - loss.Value(w_star, test.row(i));
    const double delta = diff - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (diff - mean);
  }
  const double nn = static_cast<double>(test.n());
  const double var = test.n() > 1 ? m2 / (nn - 1.0) : 0.0;
  return {mean, std::sqrt(var / nn)};
}

}  // namespace htdp
