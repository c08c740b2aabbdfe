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

#ifndef HTDP_PRIVACY_H_
#define HTDP_PRIVACY_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "htdp/core.h"

namespace htdp {

// l1 and l2 sensitivity of a d-dimensional statistic.
struct Sensitivity {
  double l1 = 0.0;
  double l2 = 0.0;
};

// Adds i.i.d. Laplace(l1 / epsilon) noise to every coordinate. Releasing the
// result is (epsilon, 0)-DP when l1 bounds the statistic's l1 sensitivity.
std::vector<double> LaplaceMechanism(std::span<const double> v, double l1,
                                     double epsilon, RngStream& rng);

// Adds i.i.d. N(0, l2^2 / (2 rho)) noise to every coordinate; rho-zCDP when l2
// bounds the l2 sensitivity.
std::vector<double> GaussianMechanism(std::span<const double> v, double l2,
                                      double rho, RngStream& rng);

double LaplaceScale(double l1, double epsilon);
double GaussianVariance(double l2, double rho);

// Append-only record of privacy charges. All charges share one notion.
class BudgetLedger {
 public:
  struct Entry {
    std::string label;
    PrivacyBudget budget;
  };

  void Charge(std::string label, const PrivacyBudget& budget);
  // Concatenation; used to combine per-worker ledgers.
  void Merge(const BudgetLedger& other);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
};

// Sequential composition: epsilons add under pure DP, rhos add under zCDP.
// The sum is compensated, so it does not depend on charge order beyond the
// last bit.
PrivacyBudget Compose(const BudgetLedger& ledger);

// epsilon-DP implies (epsilon^2 / 2)-zCDP.
double PureToCdp(double epsilon);

// rho-zCDP implies (rho + 2 sqrt(rho log(1/delta)), delta)-DP.
ApproxDp CdpToApproxDp(double rho, double delta);

// Per-step budget when rho is spread evenly over T adaptive steps.
double SplitBudget(double rho, std::int64_t steps);

// Budget charged at step t in [1, steps]. Steps before the last get
// SplitBudget(rho, steps); the last absorbs the rounding remainder so that
// Compose over all steps returns rho itself rather than rho minus an ulp.
double StepBudget(double rho, std::int64_t steps, std::int64_t step);

}  // namespace htdp

#endif  // HTDP_PRIVACY_H_
