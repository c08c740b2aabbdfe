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

// Synthetic heavy-tailed data, loss functions, and the packing / Fano
// machinery used by the lower-bound lab.

#ifndef HTDP_INSTANCES_H_
#define HTDP_INSTANCES_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "htdp/core.h"
#include "htdp/sco.h"

namespace htdp {

class HeavyTailDist {
 public:
  HeavyTailDist(std::vector<double> mean, MomentSpec moment);
  virtual ~HeavyTailDist() = default;

  std::size_t d() const { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }
  const MomentSpec& moment() const { return moment_; }

  virtual std::string id() const = 0;
  virtual void Sample(RngStream& rng, std::span<double> out) const = 0;
  Dataset SampleDataset(std::size_t n, RngStream& rng) const;

 private:
  std::vector<double> mean_;
  MomentSpec moment_;
};

// E|T|^k for a standard Student-t with dof degrees of freedom, by numerical
// integration of the density (requires dof > k).
double StudentTAbsMoment(double dof, double k);

// Scale s with E|s T|^k = 1 for dof = k + 0.1. Cached per k.
double StudentTScale(double k);

class StudentTCoordwise : public HeavyTailDist {
 public:
  StudentTCoordwise(double k, std::vector<double> mean);

  std::string id() const override;
  void Sample(RngStream& rng, std::span<double> out) const override;

  double dof() const { return dof_; }
  double scale() const { return scale_; }

 private:
  double dof_;
  double scale_;
};

// Coordinates i.i.d. mu_j + s T_j, T_j ~ t(k + 0.1), E|X_j - mu_j|^k = 1.
std::unique_ptr<StudentTCoordwise> MakeStudentT(double k, std::size_t d,
                                                std::vector<double> mean);

// (1 - p) point mass at 0 plus p point mass at p^{-1/k} nu, where nu has
// entries in {-1, 0, 1} with exactly d/2 nonzero.
class PackingDistribution {
 public:
  PackingDistribution(std::vector<int> nu, double p, double k);

  std::size_t d() const { return nu_.size(); }
  const std::vector<int>& nu() const { return nu_; }
  double p() const { return p_; }
  double k() const { return k_; }

  // p^{-1/k} nu.
  std::vector<double> Atom() const;
  // p^{(k-1)/k} nu.
  std::vector<double> Mean() const;
  // Exact E|X_j - mu_j|^k on a coordinate where nu is nonzero (0 elsewhere).
  double CentralMoment() const;
  // Exact E[clip(X, center - 3 tau, center + 3 tau)].
  std::vector<double> TruncatedMean(double tau, double center = 0.0) const;

  void Sample(RngStream& rng, std::span<double> out) const;

 private:
  std::vector<int> nu_;
  double p_;
  double k_;
};

class PackingSampler : public HeavyTailDist {
 public:
  explicit PackingSampler(PackingDistribution dist);
  std::string id() const override;
  void Sample(RngStream& rng, std::span<double> out) const override;
  const PackingDistribution& packing() const { return dist_; }

 private:
  PackingDistribution dist_;
};

// The pattern with ones on the first d/2 coordinates.
std::vector<int> DefaultPackingPattern(std::size_t d);

class GvShortfall : public std::runtime_error {
 public:
  GvShortfall(std::size_t achieved, std::size_t target);
  std::size_t achieved() const { return achieved_; }
  std::size_t target() const { return target_; }

 private:
  std::size_t achieved_;
  std::size_t target_;
};

// ceil(2^{d/8}).
std::size_t GvTarget(std::size_t d);

// Greedy constant-weight code: words of weight d/2 with pairwise Hamming
// distance >= d/8, up to GvTarget(d) words. Lexicographic scan for d <= 24,
// random candidates from rng otherwise. Throws GvShortfall when the target is
// not reached.
std::vector<std::vector<int>> GvCode(std::size_t d, RngStream& rng);
std::vector<std::vector<int>> GvCode(std::size_t d);

int HammingDistance(std::span<const int> a, std::span<const int> b);

struct FanoParams {
  double r = 1.0;
  double m_count = 2.0;
  double alpha = 0.0;
  double beta_kl = 0.0;
  double rho = 0.0;
  double n = 1.0;

  void Validate() const;
};

// (r/2) max{1 - (beta + ln 2)/ln M,
//           1 - (rho (n^2 alpha^2 + n alpha (1 - alpha)) + ln 2)/ln M}, >= 0.
double FanoBound(const FanoParams& params);

struct TvKl {
  double tv;
  // +infinity exactly when kl_infinite.
  double kl;
  bool kl_infinite;
};

// Distributions given as probability vectors over one shared finite support.
TvKl TvAndKl(std::span<const double> p, std::span<const double> q);

struct SharedSupport {
  std::vector<std::vector<double>> points;
  std::vector<double> p;
  std::vector<double> q;
};

SharedSupport OnSharedSupport(const PackingDistribution& a,
                              const PackingDistribution& b);

struct LossParams {
  // Constraint ball radius; M = 2 radius.
  double radius = 1.0;
  // R, the bound on ||E grad||.
  double gradient_mean_bound = 1.0;
  double k = 2.0;
  // Linear regression only: smoothness and strong convexity of the design.
  double smoothness = 1.0;
  double strong_convexity = 0.0;
};

// 1/2 ||w - x||^2; lambda = L = 1.
class QuadraticLoss : public LossOracle {
 public:
  explicit QuadraticLoss(const LossParams& params);
  std::string name() const override { return "quadratic"; }
  double Value(std::span<const double> w,
               std::span<const double> x) const override;
  void Gradient(std::span<const double> w, std::span<const double> x,
                std::span<double> out) const override;
  void Gradients(std::span<const double> w, SampleView samples,
                 std::span<double> out) const override;
};

// -<w, x>; L = 0.
class LinearLoss : public LossOracle {
 public:
  explicit LinearLoss(const LossParams& params);
  std::string name() const override { return "linear"; }
  double Value(std::span<const double> w,
               std::span<const double> x) const override;
  void Gradient(std::span<const double> w, std::span<const double> x,
                std::span<double> out) const override;
};

// Samples are (a_1..a_p, b); 1/2 (<w, a> - b)^2.
class LinearRegressionLoss : public LossOracle {
 public:
  explicit LinearRegressionLoss(const LossParams& params);
  std::string name() const override { return "linear_regression"; }
  std::size_t ParameterDim(std::size_t sample_dim) const override;
  double Value(std::span<const double> w,
               std::span<const double> x) const override;
  void Gradient(std::span<const double> w, std::span<const double> x,
                std::span<double> out) const override;
};

std::unique_ptr<LossOracle> MakeLoss(const std::string& kind,
                                     const LossParams& params);

// "student_t", "student_t:k=2.0", "packing:p=0.1".
struct DistributionId {
  std::string family;
  std::map<std::string, double> params;

  static DistributionId Parse(const std::string& text);
  std::string ToString() const;
};

// k is used unless the id carries its own. The mean applies to student_t;
// packing distributions fix their own mean.
std::unique_ptr<HeavyTailDist> MakeDistribution(const DistributionId& id,
                                                double k, std::size_t d,
                                                std::vector<double> mean);

}  // namespace htdp

#endif  // HTDP_INSTANCES_H_
