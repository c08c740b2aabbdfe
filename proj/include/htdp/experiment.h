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

// Monte Carlo sweeps over (n, d, k, budget, q) grids and their summaries.

#ifndef HTDP_EXPERIMENT_H_
#define HTDP_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "htdp/meanest.h"

namespace htdp {

struct ExperimentConfig {
  // mean-est | sco | lower-bound
  std::string task = "mean-est";
  std::string algorithm = "cdp_hdme";
  std::string distribution = "student_t";
  std::string loss = "quadratic";
  std::vector<std::int64_t> n = {1024};
  std::vector<std::int64_t> d = {2};
  std::vector<double> k = {2.0};
  std::vector<double> rho = {1.0};
  std::vector<double> eps = {1.0};
  std::vector<double> q = {0.5};
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  std::string out;
  Calibration calibration = Calibration::kExact;

  double beta = 0.1;
  // Fixed truncation scale; the algorithm's recommended tau when 0.
  double tau = 0.0;
  double smoothing_variance = 1.0;
  // SCO constraint ball radius (centred at the origin).
  double radius = 1.0;
  // Norm of the data mean, along the unit vector proportional to
  // (4, -3, 4, -3, ...).
  double mean_norm = 0.0;
  std::int64_t max_steps = 1'000'000;
  // Worker threads; 0 means hardware concurrency.
  int workers = 0;
  // Record wall-clock runtime_ms (otherwise 0, keeping reruns identical).
  bool timing = false;

  static ExperimentConfig FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;

  // Throws UsageError on the first violated precondition.
  void Validate() const;
  // Algorithms valid for the task.
  static std::vector<std::string> Algorithms(const std::string& task);
};

struct ResultRow {
  std::string task;
  std::string algorithm;
  std::int64_t n = 0;
  std::int64_t d = 0;
  double k = 0.0;
  double rho_or_eps = 0.0;
  double tau = 0.0;
  std::int64_t T = 0;
  double eta = 0.0;
  double q = 0.0;
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  std::string metric_name;
  double metric_value = 0.0;
  double std_error = 0.0;
  double budget_spent = 0.0;
  double runtime_ms = 0.0;
  // ';'-separated.
  std::string warnings;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

// Unit vector proportional to (4, -3, 4, -3, ...).
std::vector<double> MeanDirection(std::size_t d);

// One row per (grid point, trial), ordered by grid point (n, d, k, budget, q
// nested in that order) and then by trial. Identical for any worker count.
std::vector<ResultRow> RunExperiment(const ExperimentConfig& config);

struct SummaryRow {
  std::string task;
  std::string algorithm;
  std::int64_t n = 0;
  std::int64_t d = 0;
  double k = 0.0;
  double rho_or_eps = 0.0;
  double q = 0.0;
  std::string metric_name;
  std::int64_t count = 0;
  double median = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double p90 = 0.0;
};

struct SlopeFit {
  std::string task;
  std::string algorithm;
  std::int64_t d = 0;
  double k = 0.0;
  double rho_or_eps = 0.0;
  double q = 0.0;
  std::string metric_name;
  std::int64_t points = 0;
  double slope = 0.0;
  // 95% interval; infinite with two points.
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct Summary {
  std::vector<SummaryRow> rows;
  // One fit per series with at least two distinct n.
  std::vector<SlopeFit> slopes;
};

Summary Summarize(const std::vector<ResultRow>& rows);

struct LinearFit {
  double slope;
  double intercept;
  double slope_stderr;
};

// Ordinary least squares of y on x.
LinearFit FitLine(const std::vector<double>& x, const std::vector<double>& y);

// Quantile with linear interpolation between order statistics.
double Quantile(std::vector<double> values, double q);

}  // namespace htdp

#endif  // HTDP_EXPERIMENT_H_
