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

#include "htdp/instances.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "htdp/kernels.h"

namespace htdp {
namespace {

constexpr double kDofOffset = 0.1;

double LogStudentTDensity(double t, double dof) {
  const double log_norm = std::lgamma(0.5 * (dof + 1.0)) -
                          std::lgamma(0.5 * dof) -
                          0.5 * std::log(dof * M_PI);
  return log_norm - 0.5 * (dof + 1.0) * std::log1p(t * t / dof);
}

// log f(e^u) without overflowing t^2 for large u.
double LogStudentTDensityAtExp(double u, double dof) {
  const double log_norm = std::lgamma(0.5 * (dof + 1.0)) -
                          std::lgamma(0.5 * dof) -
                          0.5 * std::log(dof * M_PI);
  double log1p_term;
  if (2.0 * u > 600.0) {
    log1p_term = 2.0 * u - std::log(dof);
  } else {
    log1p_term = std::log1p(std::exp(2.0 * u) / dof);
  }
  return log_norm - 0.5 * (dof + 1.0) * log1p_term;
}

void RequireDims(std::span<const double> w, std::span<const double> x) {
  if (w.size() != x.size()) throw UsageError("loss dimension mismatch");
}

LossConstants Constants(const LossParams& p, double L, double lambda) {
  if (!(p.radius > 0)) throw UsageError("constraint radius must be positive");
  LossConstants c;
  c.smoothness = L;
  c.strong_convexity = lambda;
  c.diameter = 2.0 * p.radius;
  c.gradient_mean_bound = p.gradient_mean_bound;
  c.moment.k = p.k;
  return c;
}

std::string FormatNumber(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

HeavyTailDist::HeavyTailDist(std::vector<double> mean, MomentSpec moment)
    : mean_(std::move(mean)), moment_(moment) {
  if (mean_.empty()) throw UsageError("dimension must be >= 1");
  for (double m : mean_) {
    if (!std::isfinite(m)) throw UsageError("mean must be finite");
  }
  moment_.Validate();
}

Dataset HeavyTailDist::SampleDataset(std::size_t n, RngStream& rng) const {
  if (n < 1) throw UsageError("n must be >= 1");
  std::vector<double> values(n * d());
  for (std::size_t i = 0; i < n; ++i) {
    Sample(rng, std::span<double>(values).subspan(i * d(), d()));
  }
  return Dataset(n, d(), std::move(values));
}

double StudentTAbsMoment(double dof, double k) {
  if (!(k > 0)) throw UsageError("moment order must be positive");
  if (!(dof > k)) throw UsageError("moment of order k needs dof > k");
  // [0, 1] directly in t; [1, inf) in u = ln t, where the integrand decays
  // like exp(-(dof - k) u).
  auto near = [&](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(k * std::log(t) + LogStudentTDensity(t, dof));
  };
  auto far = [&](double u) {
    return std::exp((k + 1.0) * u + LogStudentTDensityAtExp(u, dof));
  };
  const double head =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(near, 0.0,
                                                                    1.0, 15, 1e-14);
  boost::math::quadrature::exp_sinh<double> tail_integrator;
  const double tail = tail_integrator.integrate(
      far, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
  return 2.0 * (head + tail);
}

double StudentTScale(double k) {
  if (!(k >= 2)) throw UsageError("moment order k must be >= 2");
  static std::mutex mu;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  const double scale = std::pow(StudentTAbsMoment(k + kDofOffset, k), -1.0 / k);
  cache.emplace(k, scale);
  return scale;
}

StudentTCoordwise::StudentTCoordwise(double k, std::vector<double> mean)
    : HeavyTailDist(std::move(mean), MomentSpec{k, 1.0}),
      dof_(k + kDofOffset),
      scale_(StudentTScale(k)) {}

std::string StudentTCoordwise::id() const {
  return "student_t:k=" + FormatNumber(moment().k);
}

void StudentTCoordwise::Sample(RngStream& rng, std::span<double> out) const {
  std::student_t_distribution<double> t(dof_);
  for (std::size_t j = 0; j < d(); ++j) {
    out[j] = mean()[j] + scale_ * t(rng.engine());
  }
}

std::unique_ptr<StudentTCoordwise> MakeStudentT(double k, std::size_t d,
                                                std::vector<double> mean) {
  if (!(k >= 2)) throw UsageError("moment order k must be >= 2");
  if (mean.empty()) mean.assign(d, 0.0);
  if (mean.size() != d) throw UsageError("mean has the wrong dimension");
  return std::make_unique<StudentTCoordwise>(k, std::move(mean));
}

PackingDistribution::PackingDistribution(std::vector<int> nu, double p,
                                         double k)
    : nu_(std::move(nu)), p_(p), k_(k) {
  if (!(p_ > 0 && p_ <= 1)) throw UsageError("p must lie in (0, 1]");
  if (!(k_ >= 2)) throw UsageError("moment order k must be >= 2");
  if (nu_.empty() || nu_.size() % 2 != 0) {
    throw UsageError("packing dimension must be even and positive");
  }
  std::size_t weight = 0;
  for (int v : nu_) {
    if (v != 0 && v != 1 && v != -1) throw UsageError("nu entries must be in {-1,0,1}");
    if (v != 0) ++weight;
  }
  if (weight != nu_.size() / 2) throw UsageError("nu must have weight d/2");
}

std::vector<double> PackingDistribution::Atom() const {
  const double a = std::pow(p_, -1.0 / k_);
  std::vector<double> out(nu_.size());
  for (std::size_t j = 0; j < nu_.size(); ++j) out[j] = a * nu_[j];
  return out;
}

std::vector<double> PackingDistribution::Mean() const {
  const double a = std::pow(p_, (k_ - 1.0) / k_);
  std::vector<double> out(nu_.size());
  for (std::size_t j = 0; j < nu_.size(); ++j) out[j] = a * nu_[j];
  return out;
}

double PackingDistribution::CentralMoment() const {
  const double atom = std::pow(p_, -1.0 / k_);
  const double mu = p_ * atom;
  return (1.0 - p_) * std::pow(mu, k_) + p_ * std::pow(atom - mu, k_);
}

std::vector<double> PackingDistribution::TruncatedMean(double tau,
                                                       double center) const {
  if (!(tau > 0)) throw UsageError("tau must be positive");
  const double lo = center - 3.0 * tau;
  const double hi = center + 3.0 * tau;
  const std::vector<double> atom = Atom();
  std::vector<double> out(nu_.size());
  for (std::size_t j = 0; j < nu_.size(); ++j) {
    out[j] = (1.0 - p_) * Clip(0.0, lo, hi) + p_ * Clip(atom[j], lo, hi);
  }
  return out;
}

void PackingDistribution::Sample(RngStream& rng, std::span<double> out) const {
  if (rng.Uniform() < p_) {
    const double a = std::pow(p_, -1.0 / k_);
    for (std::size_t j = 0; j < nu_.size(); ++j) out[j] = a * nu_[j];
  } else {
    std::fill(out.begin(), out.begin() + nu_.size(), 0.0);
  }
}

PackingSampler::PackingSampler(PackingDistribution dist)
    : HeavyTailDist(dist.Mean(), MomentSpec{dist.k(), 1.0}),
      dist_(std::move(dist)) {}

std::string PackingSampler::id() const {
  return "packing:p=" + FormatNumber(dist_.p());
}

void PackingSampler::Sample(RngStream& rng, std::span<double> out) const {
  dist_.Sample(rng, out);
}

std::vector<int> DefaultPackingPattern(std::size_t d) {
  if (d == 0 || d % 2 != 0) throw UsageError("packing dimension must be even");
  std::vector<int> nu(d, 0);
  std::fill(nu.begin(), nu.begin() + d / 2, 1);
  return nu;
}

GvShortfall::GvShortfall(std::size_t achieved, std::size_t target)
    : std::runtime_error("greedy code reached " + std::to_string(achieved) +
                         " of " + std::to_string(target) + " words"),
      achieved_(achieved),
      target_(target) {}

std::size_t GvTarget(std::size_t d) {
  return static_cast<std::size_t>(std::ceil(std::exp2(static_cast<double>(d) / 8.0)));
}

int HammingDistance(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw UsageError("codeword length mismatch");
  int dist = 0;
  for (std::size_t j = 0; j < a.size(); ++j) dist += a[j] != b[j] ? 1 : 0;
  return dist;
}

std::vector<std::vector<int>> GvCode(std::size_t d, RngStream& rng) {
  if (d < 8 || d % 2 != 0) throw UsageError("gv_code needs even d >= 8");
  const std::size_t target = GvTarget(d);
  const double min_dist = static_cast<double>(d) / 8.0;
  std::vector<std::vector<int>> code;
  auto consider = [&](const std::vector<int>& word) {
    for (const auto& kept : code) {
      if (HammingDistance(word, kept) < min_dist) return;
    }
    code.push_back(word);
  };

  std::vector<int> word(d, 0);
  std::fill(word.begin() + d / 2, word.end(), 1);
  if (d <= 24) {
    // Ascending lexicographic order over weight-d/2 words.
    do {
      consider(word);
    } while (code.size() < target && std::next_permutation(word.begin(), word.end()));
  } else {
    const std::size_t attempts = 200 * target + 1000;
    for (std::size_t a = 0; a < attempts && code.size() < target; ++a) {
      std::shuffle(word.begin(), word.end(), rng.engine());
      consider(word);
    }
  }
  if (code.size() < target) throw GvShortfall(code.size(), target);
  return code;
}

std::vector<std::vector<int>> GvCode(std::size_t d) {
  RngStream rng(0, {"gv_code"});
  return GvCode(d, rng);
}

void FanoParams::Validate() const {
  if (!(m_count >= 2)) throw UsageError("packing size must be >= 2");
  if (!(r >= 0) || !(beta_kl >= 0) || !(rho >= 0) || !(n >= 0)) {
    throw UsageError("Fano parameters must be nonnegative");
  }
  if (!(alpha >= 0 && alpha <= 1)) throw UsageError("alpha must lie in [0, 1]");
}

double FanoBound(const FanoParams& f) {
  f.Validate();
  const double log_m = std::log(f.m_count);
  const double ln2 = std::log(2.0);
  const double first = 1.0 - (f.beta_kl + ln2) / log_m;
  const double second =
      1.0 - (f.rho * (f.n * f.n * f.alpha * f.alpha +
                      f.n * f.alpha * (1.0 - f.alpha)) +
             ln2) / log_m;
  return std::max(0.0, 0.5 * f.r * std::max(first, second));
}

TvKl TvAndKl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) {
    throw UsageError("distributions must share a nonempty support");
  }
  double sp = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0) || !(q[i] >= 0) || !std::isfinite(p[i]) ||
        !std::isfinite(q[i])) {
      throw UsageError("probabilities must be finite and nonnegative");
    }
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > 1e-12 || std::abs(sq - 1.0) > 1e-12) {
    throw UsageError("probabilities must sum to 1");
  }
  TvKl out{0.0, 0.0, false};
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.tv += std::abs(p[i] - q[i]);
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      out.kl_infinite = true;
      continue;
    }
    out.kl += p[i] * std::log(p[i] / q[i]);
  }
  out.tv *= 0.5;
  if (out.kl_infinite) out.kl = std::numeric_limits<double>::infinity();
  return out;
}

SharedSupport OnSharedSupport(const PackingDistribution& a,
                              const PackingDistribution& b) {
  if (a.d() != b.d()) throw UsageError("packing dimension mismatch");
  SharedSupport s;
  auto index_of = [&](const std::vector<double>& point) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (s.points[i] == point) return i;
    }
    s.points.push_back(point);
    s.p.push_back(0.0);
    s.q.push_back(0.0);
    return s.points.size() - 1;
  };
  const std::vector<double> zero(a.d(), 0.0);
  s.p[index_of(zero)] += 1.0 - a.p();
  s.p[index_of(a.Atom())] += a.p();
  s.q[index_of(zero)] += 1.0 - b.p();
  s.q[index_of(b.Atom())] += b.p();
  return s;
}

QuadraticLoss::QuadraticLoss(const LossParams& params)
    : LossOracle(Constants(params, 1.0, 1.0)) {}

double QuadraticLoss::Value(std::span<const double> w,
                            std::span<const double> x) const {
  RequireDims(w, x);
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += (w[j] - x[j]) * (w[j] - x[j]);
  return 0.5 * s;
}

void QuadraticLoss::Gradient(std::span<const double> w,
                             std::span<const double> x,
                             std::span<double> out) const {
  RequireDims(w, x);
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = w[j] - x[j];
}

void QuadraticLoss::Gradients(std::span<const double> w, SampleView samples,
                              std::span<double> out) const {
  if (w.size() != samples.d()) throw UsageError("loss dimension mismatch");
  kernels::Active().residuals(w.data(), samples.values().data(), samples.n(),
                              samples.d(), out.data());
}

LinearLoss::LinearLoss(const LossParams& params)
    : LossOracle(Constants(params, 0.0, 0.0)) {}

double LinearLoss::Value(std::span<const double> w,
                         std::span<const double> x) const {
  RequireDims(w, x);
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
  return -s;
}

void LinearLoss::Gradient(std::span<const double> w, std::span<const double> x,
                          std::span<double> out) const {
  RequireDims(w, x);
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = -x[j];
}

LinearRegressionLoss::LinearRegressionLoss(const LossParams& params)
    : LossOracle(Constants(params, params.smoothness, params.strong_convexity)) {}

std::size_t LinearRegressionLoss::ParameterDim(std::size_t sample_dim) const {
  if (sample_dim < 2) throw UsageError("regression samples need d >= 2");
  return sample_dim - 1;
}

double LinearRegressionLoss::Value(std::span<const double> w,
                                   std::span<const double> x) const {
  if (x.size() != w.size() + 1) throw UsageError("loss dimension mismatch");
  double r = -x[w.size()];
  for (std::size_t j = 0; j < w.size(); ++j) r += w[j] * x[j];
  return 0.5 * r * r;
}

void LinearRegressionLoss::Gradient(std::span<const double> w,
                                    std::span<const double> x,
                                    std::span<double> out) const {
  if (x.size() != w.size() + 1) throw UsageError("loss dimension mismatch");
  double r = -x[w.size()];
  for (std::size_t j = 0; j < w.size(); ++j) r += w[j] * x[j];
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = r * x[j];
}

std::unique_ptr<LossOracle> MakeLoss(const std::string& kind,
                                     const LossParams& params) {
  if (kind == "quadratic") return std::make_unique<QuadraticLoss>(params);
  if (kind == "linear") return std::make_unique<LinearLoss>(params);
  if (kind == "linear_regression") {
    return std::make_unique<LinearRegressionLoss>(params);
  }
  throw UsageError("unknown loss: " + kind);
}

DistributionId DistributionId::Parse(const std::string& text) {
  DistributionId id;
  const auto colon = text.find(':');
  id.family = text.substr(0, colon);
  if (id.family != "student_t" && id.family != "packing") {
    throw UsageError("unknown distribution: " + text);
  }
  std::stringstream rest(colon == std::string::npos ? "" : text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("malformed distribution parameter: " + item);
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      throw UsageError("malformed distribution parameter: " + item);
    }
    if (used != value.size()) {
      throw UsageError("malformed distribution parameter: " + item);
    }
    id.params[key] = v;
  }
  for (const auto& [key, value] : id.params) {
    const bool known = key == "k" || (id.family == "packing" && key == "p");
    if (!known) throw UsageError("unknown distribution parameter: " + key);
  }
  if (id.family == "packing" && !id.params.count("p")) {
    throw UsageError("packing distribution needs p");
  }
  return id;
}

std::string DistributionId::ToString() const {
  std::string out = family;
  char sep = ':';
  for (const auto& [key, value] : params) {
    out += sep + key + "=" + FormatNumber(value);
    sep = ',';
  }
  return out;
}

std::unique_ptr<HeavyTailDist> MakeDistribution(const DistributionId& id,
                                                double k, std::size_t d,
                                                std::vector<double> mean) {
  auto it = id.params.find("k");
  if (it != id.params.end()) k = it->second;
  if (id.family == "student_t") return MakeStudentT(k, d, std::move(mean));
  if (id.family == "packing") {
    PackingDistribution dist(DefaultPackingPattern(d), id.params.at("p"), k);
    return std::make_unique<PackingSampler>(std::move(dist));
  }
  throw UsageError("unknown distribution: " + id.family);
}

}  // namespace htdp
