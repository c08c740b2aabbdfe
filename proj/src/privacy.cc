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

#include "htdp/privacy.h"

#include <cmath>

namespace htdp {
namespace {

// Neumaier summation.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace

double LaplaceScale(double l1, double epsilon) {
  if (!(epsilon > 0)) throw UsageError("epsilon must be positive");
  if (!(l1 >= 0)) throw UsageError("l1 sensitivity must be nonnegative");
  return l1 / epsilon;
}

double GaussianVariance(double l2, double rho) {
  if (!(rho > 0)) throw UsageError("rho must be positive");
  if (!(l2 >= 0)) throw UsageError("l2 sensitivity must be nonnegative");
  return l2 * l2 / (2.0 * rho);
}

std::vector<double> LaplaceMechanism(std::span<const double> v, double l1,
                                     double epsilon, RngStream& rng) {
  const double scale = LaplaceScale(l1, epsilon);
  std::vector<double> out(v.begin(), v.end());
  if (scale == 0.0) return out;
  for (double& x : out) x += rng.Laplace(scale);
  return out;
}

std::vector<double> GaussianMechanism(std::span<const double> v, double l2,
                                      double rho, RngStream& rng) {
  const double sigma = std::sqrt(GaussianVariance(l2, rho));
  std::vector<double> out(v.begin(), v.end());
  if (sigma == 0.0) return out;
  for (double& x : out) x += sigma * rng.Normal();
  return out;
}

void BudgetLedger::Charge(std::string label, const PrivacyBudget& budget) {
  if (!entries_.empty() &&
      entries_.front().budget.value().index() != budget.value().index()) {
    throw UsageError("ledger cannot mix privacy notions");
  }
  entries_.push_back({std::move(label), budget});
}

void BudgetLedger::Merge(const BudgetLedger& other) {
  for (const auto& e : other.entries_) Charge(e.label, e.budget);
}

PrivacyBudget Compose(const BudgetLedger& ledger) {
  if (ledger.empty()) throw UsageError("cannot compose an empty ledger");
  const auto& first = ledger.entries().front().budget;
  if (first.is_approx()) {
    // Basic composition for (epsilon, delta) charges.
    CompensatedSum eps;
    CompensatedSum delta;
    for (const auto& e : ledger.entries()) {
      const auto& b = std::get<ApproxDp>(e.budget.value());
      eps.Add(b.epsilon);
      delta.Add(b.delta);
    }
    return PrivacyBudget::Approximate(eps.value(), delta.value());
  }
  CompensatedSum total;
  for (const auto& e : ledger.entries()) {
    if (e.budget.value().index() != first.value().index()) {
      throw UsageError("ledger cannot mix privacy notions");
    }
    total.Add(e.budget.primary());
  }
  return first.is_pure() ? PrivacyBudget::Pure(total.value())
                         : PrivacyBudget::Concentrated(total.value());
}

double PureToCdp(double epsilon) {
  if (!(epsilon > 0)) throw UsageError("epsilon must be positive");
  return 0.5 * epsilon * epsilon;
}

ApproxDp CdpToApproxDp(double rho, double delta) {
  if (!(rho > 0)) throw UsageError("rho must be positive");
  if (!(delta > 0 && delta < 1)) throw UsageError("delta must lie in (0,1)");
  return {rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta)), delta};
}

double SplitBudget(double rho, std::int64_t steps) {
  if (!(rho > 0)) throw UsageError("rho must be positive");
  if (steps < 1) throw UsageError("step count must be >= 1");
  return rho / static_cast<double>(steps);
}

double StepBudget(double rho, std::int64_t steps, std::int64_t step) {
  const double share = SplitBudget(rho, steps);
  if (step < 1 || step > steps) throw UsageError("step index out of range");
  if (step < steps) return share;
  if (steps == 1) return rho;
  // p + e == (steps-1)*share exactly; rho - p is exact since p >= rho/2.
  const double before = static_cast<double>(steps - 1);
  const double p = before * share;
  const double e = std::fma(before, share, -p);
  return (rho - p) - e;
}

}  // namespace htdp
