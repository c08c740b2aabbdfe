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

#include "htdp/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "htdp/csv.h"
#include "htdp/instances.h"
#include "htdp/privacy.h"
#include "htdp/sco.h"

namespace htdp {
namespace {

using nlohmann::json;

const std::vector<std::string>& Keys() {
  static const std::vector<std::string> keys = {
      "task",  "algorithm", "distribution", "loss",   "n",
      "d",     "k",         "rho",          "eps",    "q",
      "trials", "seed",     "out",          "calibration",
      "beta",  "tau",       "smoothing_variance", "radius",
      "mean_norm", "max_steps", "workers", "timing"};
  return keys;
}

template <typename T>
std::vector<T> ReadGrid(const json& v, const char* key) {
  try {
    if (v.is_array()) {
      std::vector<T> out;
      for (const auto& e : v) out.push_back(e.get<T>());
      return out;
    }
    return {v.get<T>()};
  } catch (const json::exception&) {
    throw UsageError(std::string("config field '") + key + "' has the wrong type");
  }
}

template <typename T>
T Read(const json& v, const char* key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config field '") + key + "' has the wrong type");
  }
}

bool IsPrivate(const std::string& algorithm) {
  return algorithm != "hdme" && algorithm != "nsme" && algorithm != "fano";
}

bool UsesEpsilon(const std::string& algorithm) { return algorithm == "dp_hdme"; }

bool UsesQ(const std::string& algorithm) {
  return algorithm == "cdp_sco_convex_nsme";
}

bool IsHdme(const std::string& algorithm) {
  return algorithm == "hdme" || algorithm == "cdp_hdme" || algorithm == "dp_hdme";
}

struct GridPoint {
  std::int64_t n;
  std::int64_t d;
  double k;
  double budget;
  double q;

  std::string Key() const {
    return "n=" + std::to_string(n) + ";d=" + std::to_string(d) +
           ";k=" + FormatDouble(k) + ";b=" + FormatDouble(budget) +
           ";q=" + FormatDouble(q);
  }
  std::string DataKey() const {
    return "n=" + std::to_string(n) + ";d=" + std::to_string(d) +
           ";k=" + FormatDouble(k);
  }
};

std::vector<GridPoint> Grid(const ExperimentConfig& c) {
  std::vector<double> budgets;
  if (!IsPrivate(c.algorithm) && c.task != "lower-bound") {
    budgets = {0.0};
  } else if (UsesEpsilon(c.algorithm)) {
    budgets = c.eps;
  } else {
    budgets = c.rho;
  }
  const std::vector<double> qs = UsesQ(c.algorithm) ? c.q : std::vector<double>{0.0};
  std::vector<GridPoint> grid;
  for (auto n : c.n) {
    for (auto d : c.d) {
      for (double k : c.k) {
        for (double b : budgets) {
          for (double q : qs) grid.push_back({n, d, k, b, q});
        }
      }
    }
  }
  return grid;
}

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ';';
    out += p;
  }
  return out;
}

double Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double Dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

double ComposedBudget(const BudgetLedger& ledger) {
  return ledger.empty() ? 0.0 : Compose(ledger).primary();
}

// Second moment of one standardized Student-t coordinate.
double StudentTVariance(double k) {
  const double s = StudentTScale(k);
  const double dof = k + 0.1;
  return s * s * dof / (dof - 2.0);
}

// Loss, data mean (or regression target) and R for one SCO grid point.
struct ScoSetup {
  std::unique_ptr<LossOracle> loss;
  std::vector<double> target;
  // Population curvature of the regression loss; 1 otherwise.
  double curvature = 1.0;
};

ScoSetup MakeScoSetup(const ExperimentConfig& c, const GridPoint& g) {
  ScoSetup s;
  s.target = MeanDirection(static_cast<std::size_t>(g.d));
  for (double& v : s.target) v *= c.mean_norm;
  const double mu = Norm(s.target);
  LossParams p;
  p.radius = c.radius;
  p.k = g.k;
  if (c.loss == "quadratic") {
    p.gradient_mean_bound = c.radius + mu;
  } else if (c.loss == "linear") {
    p.gradient_mean_bound = mu;
  } else {
    s.curvature = StudentTVariance(g.k);
    p.smoothness = s.curvature;
    p.strong_convexity = s.curvature;
    p.gradient_mean_bound = s.curvature * (c.radius + mu);
  }
  s.loss = MakeLoss(c.loss, p);
  return s;
}

Dataset ScoData(const ExperimentConfig& c, const GridPoint& g,
                const ScoSetup& s, RngStream& rng) {
  const auto n = static_cast<std::size_t>(g.n);
  const auto d = static_cast<std::size_t>(g.d);
  if (c.loss != "linear_regression") {
    auto dist = MakeStudentT(g.k, d, s.target);
    return dist->SampleDataset(n, rng);
  }
  // Rows (a, <w_true, a> + e) with a and e Student-t.
  auto design = MakeStudentT(g.k, d + 1, {});
  std::vector<double> values(n * (d + 1));
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> row(values.data() + i * (d + 1), d + 1);
    design->Sample(rng, row);
    double b = row[d];
    for (std::size_t j = 0; j < d; ++j) b += s.target[j] * row[j];
    row[d] = b;
  }
  return Dataset(n, d + 1, std::move(values));
}

double ScoExcessRisk(const ExperimentConfig& c, const ScoSetup& s,
                     std::span<const double> w) {
  const Ball ball(std::vector<double>(s.target.size(), 0.0), c.radius);
  if (c.loss == "linear") {
    const double mu = Norm(s.target);
    double risk = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      risk += (c.radius * s.target[j] / mu - w[j]) * s.target[j];
    }
    return risk;
  }
  const std::vector<double> w_star = ProjectBall(s.target, ball);
  return 0.5 * s.curvature * (Dist2(w, s.target) - Dist2(w_star, s.target));
}

TauChoice MeanEstTau(const ExperimentConfig& c, const GridPoint& g) {
  if (c.tau > 0) return {c.tau, c.tau, false};
  TauParams p;
  p.n = static_cast<double>(g.n);
  p.d = static_cast<double>(g.d);
  p.k = g.k;
  if (UsesEpsilon(c.algorithm)) {
    p.epsilon = g.budget;
    return RecommendedTau(TauRule::kDpHdme, p);
  }
  // Non-private estimators use the rho = 1 balance.
  p.rho = IsPrivate(c.algorithm) ? g.budget : 1.0;
  return RecommendedTau(TauRule::kCdpHdme, p);
}

ScoOptions MakeScoOptions(const ExperimentConfig& c) {
  ScoOptions opt;
  opt.beta = c.beta;
  opt.smoothing_variance = c.smoothing_variance;
  opt.calibration = c.calibration;
  opt.max_steps = c.max_steps;
  return opt;
}

ScoSchedule PlanSco(const ExperimentConfig& c, const GridPoint& g,
                    const LossOracle& loss) {
  const auto n = static_cast<std::size_t>(g.n);
  const auto d = static_cast<std::size_t>(g.d);
  const ScoOptions opt = MakeScoOptions(c);
  if (c.algorithm == "cdp_sco_convex_hdme") {
    return ConvexHdmeSchedule(n, d, g.budget, loss.constants(), opt);
  }
  if (c.algorithm == "cdp_sco_convex_nsme") {
    return ConvexNsmeSchedule(n, d, g.budget, g.q, loss.constants(), opt);
  }
  return StronglyConvexSchedule(n, d, g.budget, loss.constants(), opt);
}

void RunMeanEst(const ExperimentConfig& c, const GridPoint& g,
                RngStream& data_rng, RngStream& mech_rng, ResultRow& row) {
  const auto d = static_cast<std::size_t>(g.d);
  std::vector<double> mean = MeanDirection(d);
  for (double& v : mean) v *= c.mean_norm;
  auto dist = MakeDistribution(DistributionId::Parse(c.distribution), g.k, d, mean);
  const Dataset data = dist->SampleDataset(static_cast<std::size_t>(g.n), data_rng);

  const TauChoice tau = MeanEstTau(c, g);
  std::vector<std::string> warnings;
  if (tau.floored) warnings.emplace_back("tau_floored");
  MeanEstimate est;
  if (IsHdme(c.algorithm)) {
    HdmeConfig cfg;
    cfg.tau = tau.tau;
    cfg.beta = c.beta;
    if (c.algorithm == "hdme") est = Hdme(data, cfg);
    if (c.algorithm == "cdp_hdme") est = CdpHdme(data, cfg, g.budget, mech_rng);
    if (c.algorithm == "dp_hdme") est = DpHdme(data, cfg, g.budget, mech_rng);
  } else {
    NsmeConfig cfg;
    cfg.tau = tau.tau;
    cfg.smoothing_variance = c.smoothing_variance;
    if (c.algorithm == "nsme") {
      est = Nsme(data, cfg);
    } else {
      est = CdpNsme(data, cfg, g.budget, mech_rng, c.calibration);
    }
  }
  BudgetLedger ledger;
  if (est.budget_spent) ledger.Charge(c.algorithm, *est.budget_spent);
  row.tau = est.tau_used;
  row.metric_name = "l2_error";
  row.metric_value = std::sqrt(Dist2(est.value, dist->mean()));
  row.budget_spent = ComposedBudget(ledger);
  row.warnings = Join(warnings);
}

void RunSco(const ExperimentConfig& c, const GridPoint& g, RngStream& data_rng,
            RngStream& mech_rng, ResultRow& row) {
  const ScoSetup setup = MakeScoSetup(c, g);
  const Dataset data = ScoData(c, g, setup, data_rng);
  const Ball ball(std::vector<double>(static_cast<std::size_t>(g.d), 0.0),
                  c.radius);
  const ScoOptions opt = MakeScoOptions(c);
  ScoResult r;
  if (c.algorithm == "cdp_sco_convex_hdme") {
    r = CdpScoConvexHdme(data, *setup.loss, ball, g.budget, mech_rng, opt);
  } else if (c.algorithm == "cdp_sco_convex_nsme") {
    r = CdpScoConvexNsme(data, *setup.loss, ball, g.budget, g.q, mech_rng, opt);
  } else {
    r = CdpScoStronglyConvex(data, *setup.loss, ball, g.budget, mech_rng, opt);
  }
  row.tau = r.schedule.tau;
  row.T = r.schedule.steps;
  row.eta = r.schedule.eta;
  row.metric_name = "excess_risk";
  row.metric_value = ScoExcessRisk(c, setup, r.w_priv);
  row.budget_spent = ComposedBudget(r.ledger);
  row.warnings = Join(r.schedule.warnings);
}

void RunLowerBound(const ExperimentConfig& c, const GridPoint& g,
                   RngStream& rng, ResultRow& row) {
  const DistributionId id = DistributionId::Parse(c.distribution);
  const double p = id.params.at("p");
  const auto d = static_cast<std::size_t>(g.d);
  const auto code = GvCode(d, rng);
  std::vector<PackingDistribution> packing;
  for (const auto& word : code) packing.emplace_back(word, p, g.k);
  double alpha = 0.0;
  double beta = 0.0;
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < packing.size(); ++a) {
    for (std::size_t b = a + 1; b < packing.size(); ++b) {
      const SharedSupport s = OnSharedSupport(packing[a], packing[b]);
      const TvKl div = TvAndKl(s.p, s.q);
      alpha = std::max(alpha, div.tv);
      beta = std::max(beta, div.kl);
      r = std::min(r, std::sqrt(Dist2(packing[a].Mean(), packing[b].Mean())));
    }
  }
  FanoParams f;
  f.r = r;
  f.m_count = static_cast<double>(code.size());
  f.alpha = alpha;
  f.beta_kl = beta;
  f.rho = g.budget;
  f.n = static_cast<double>(g.n);
  row.metric_name = "fano_bound";
  row.metric_value = FanoBound(f);
}

}  // namespace

std::vector<std::string> ExperimentConfig::Algorithms(const std::string& task) {
  if (task == "mean-est") return {"hdme", "cdp_hdme", "dp_hdme", "nsme", "cdp_nsme"};
  if (task == "sco") {
    return {"cdp_sco_convex_hdme", "cdp_sco_convex_nsme", "cdp_sco_strongly_convex"};
  }
  if (task == "lower-bound") return {"fano"};
  throw UsageError("unknown task: " + task);
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  const auto& keys = Keys();
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw UsageError("unknown config field: " + key);
    }
  }
  ExperimentConfig c;
  if (j.contains("task")) c.task = Read<std::string>(j["task"], "task");
  if (j.contains("algorithm")) c.algorithm = Read<std::string>(j["algorithm"], "algorithm");
  if (j.contains("distribution")) {
    c.distribution = Read<std::string>(j["distribution"], "distribution");
  }
  if (j.contains("loss")) c.loss = Read<std::string>(j["loss"], "loss");
  if (j.contains("n")) c.n = ReadGrid<std::int64_t>(j["n"], "n");
  if (j.contains("d")) c.d = ReadGrid<std::int64_t>(j["d"], "d");
  if (j.contains("k")) c.k = ReadGrid<double>(j["k"], "k");
  if (j.contains("rho")) c.rho = ReadGrid<double>(j["rho"], "rho");
  if (j.contains("eps")) c.eps = ReadGrid<double>(j["eps"], "eps");
  if (j.contains("q")) c.q = ReadGrid<double>(j["q"], "q");
  if (j.contains("trials")) c.trials = Read<std::int64_t>(j["trials"], "trials");
  if (j.contains("seed")) c.seed = Read<std::uint64_t>(j["seed"], "seed");
  if (j.contains("out")) c.out = Read<std::string>(j["out"], "out");
  if (j.contains("calibration")) {
    c.calibration = ParseCalibration(Read<std::string>(j["calibration"], "calibration"));
  }
  if (j.contains("beta")) c.beta = Read<double>(j["beta"], "beta");
  if (j.contains("tau")) c.tau = Read<double>(j["tau"], "tau");
  if (j.contains("smoothing_variance")) {
    c.smoothing_variance = Read<double>(j["smoothing_variance"], "smoothing_variance");
  }
  if (j.contains("radius")) c.radius = Read<double>(j["radius"], "radius");
  if (j.contains("mean_norm")) c.mean_norm = Read<double>(j["mean_norm"], "mean_norm");
  if (j.contains("max_steps")) c.max_steps = Read<std::int64_t>(j["max_steps"], "max_steps");
  if (j.contains("workers")) c.workers = Read<int>(j["workers"], "workers");
  if (j.contains("timing")) c.timing = Read<bool>(j["timing"], "timing");
  return c;
}

json ExperimentConfig::ToJson() const {
  json j;
  j["task"] = task;
  j["algorithm"] = algorithm;
  j["distribution"] = distribution;
  j["loss"] = loss;
  j["n"] = n;
  j["d"] = d;
  j["k"] = k;
  j["rho"] = rho;
  j["eps"] = eps;
  j["q"] = q;
  j["trials"] = trials;
  j["seed"] = seed;
  j["out"] = out;
  j["calibration"] = CalibrationName(calibration);
  j["beta"] = beta;
  j["tau"] = tau;
  j["smoothing_variance"] = smoothing_variance;
  j["radius"] = radius;
  j["mean_norm"] = mean_norm;
  j["max_steps"] = max_steps;
  j["workers"] = workers;
  j["timing"] = timing;
  return j;
}

void ExperimentConfig::Validate() const {
  const auto algorithms = Algorithms(task);
  if (std::find(algorithms.begin(), algorithms.end(), algorithm) == algorithms.end()) {
    throw UsageError("algorithm '" + algorithm + "' is not valid for task " + task);
  }
  if (n.empty() || d.empty() || k.empty() || rho.empty() || eps.empty() || q.empty()) {
    throw UsageError("grids must be nonempty");
  }
  for (auto v : n) {
    if (v < 1) throw UsageError("n must be >= 1");
  }
  for (auto v : d) {
    if (v < 1) throw UsageError("d must be >= 1");
  }
  for (double v : k) {
    if (!(v >= 2) || !std::isfinite(v)) throw UsageError("k must be >= 2");
  }
  for (double v : rho) {
    if (!(v > 0) || !std::isfinite(v)) throw UsageError("rho must be positive");
  }
  for (double v : eps) {
    if (!(v > 0) || !std::isfinite(v)) throw UsageError("eps must be positive");
  }
  for (double v : q) {
    if (!(v >= 0.5 && v <= 2.0)) throw UsageError("q must lie in [0.5, 2]");
  }
  if (trials < 1) throw UsageError("trials must be >= 1");
  if (!(beta > 0 && beta < 1)) throw UsageError("beta must lie in (0, 1)");
  if (!(tau >= 0) || !std::isfinite(tau)) throw UsageError("tau must be >= 0");
  if (!(smoothing_variance >= 0) || !std::isfinite(smoothing_variance)) {
    throw UsageError("smoothing_variance must be >= 0");
  }
  if (!(radius > 0) || !std::isfinite(radius)) throw UsageError("radius must be positive");
  if (!(mean_norm >= 0) || !std::isfinite(mean_norm)) {
    throw UsageError("mean_norm must be >= 0");
  }
  if (max_steps < 1) throw UsageError("max_steps must be >= 1");
  if (workers < 0) throw UsageError("workers must be >= 0");

  const DistributionId dist = DistributionId::Parse(distribution);
  if (dist.family == "packing") {
    const double p = dist.params.at("p");
    if (!(p > 0 && p <= 1)) throw UsageError("packing p must lie in (0, 1]");
  }
  if (task == "sco") {
    if (dist.family != "student_t") throw UsageError("sco runs use student_t data");
    if (loss != "quadratic" && loss != "linear" && loss != "linear_regression") {
      throw UsageError("unknown loss: " + loss);
    }
    if (loss == "linear" && !(mean_norm > 0)) {
      throw UsageError("linear loss needs mean_norm > 0");
    }
    if (loss == "linear" && algorithm == "cdp_sco_strongly_convex") {
      throw UsageError("linear loss is not strongly convex");
    }
  }
  if (task == "lower-bound" && dist.family != "packing") {
    throw UsageError("lower-bound runs need a packing:p=... distribution");
  }

  for (const GridPoint& g : Grid(*this)) {
    const auto gn = static_cast<std::size_t>(g.n);
    const auto gd = static_cast<std::size_t>(g.d);
    const double dist_k = dist.params.count("k") ? dist.params.at("k") : g.k;
    if (!(dist_k >= 2)) throw UsageError("distribution k must be >= 2");
    if (dist.family == "packing" && g.d % 2 != 0) {
      throw UsageError("packing distributions need even d");
    }
    if (task == "mean-est" && IsHdme(algorithm)) {
      if (gn < HdmeBatchCount(beta, gd)) {
        throw UsageError("n = " + std::to_string(g.n) +
                         " is smaller than the batch count");
      }
    }
    if (task == "sco") {
      const ScoSetup setup = MakeScoSetup(*this, g);
      const ScoSchedule s = PlanSco(*this, g, *setup.loss);
      const std::size_t p = setup.loss->ParameterDim(
          loss == "linear_regression" ? gd + 1 : gd);
      const std::size_t per_step =
          algorithm == "cdp_sco_strongly_convex" ? gn / static_cast<std::size_t>(s.steps) : gn;
      if (algorithm != "cdp_sco_convex_nsme" && per_step < HdmeBatchCount(beta, p)) {
        throw UsageError("n = " + std::to_string(g.n) +
                         " leaves fewer samples per step than batches");
      }
    }
    if (task == "lower-bound" && (g.d < 8 || g.d % 2 != 0)) {
      throw UsageError("lower-bound runs need even d >= 8");
    }
  }
}

std::vector<double> MeanDirection(std::size_t d) {
  std::vector<double> u(d);
  for (std::size_t j = 0; j < d; ++j) u[j] = j % 2 == 0 ? 4.0 : -3.0;
  const double norm = Norm(u);
  for (double& v : u) v /= norm;
  return u;
}

std::vector<ResultRow> RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<GridPoint> grid = Grid(config);
  const auto trials = static_cast<std::size_t>(config.trials);
  std::vector<ResultRow> rows(grid.size() * trials);
  const RngStream master(config.seed);

  auto run_one = [&](std::size_t index) {
    const GridPoint& g = grid[index / trials];
    const auto trial = static_cast<std::uint64_t>(index % trials);
    RngStream data_rng = master.Child("data").Child(g.DataKey()).Child(trial);
    RngStream mech_rng = master.Child("mechanism").Child(g.Key()).Child(trial);
    ResultRow& row = rows[index];
    row.task = config.task;
    row.algorithm = config.algorithm;
    row.n = g.n;
    row.d = g.d;
    row.k = g.k;
    row.rho_or_eps = g.budget;
    row.q = g.q;
    row.trial = static_cast<std::int64_t>(trial);
    row.seed = mech_rng.derived_seed();
    row.metric_name = config.task == "mean-est" ? "l2_error"
                      : config.task == "sco"    ? "excess_risk"
                                                : "fano_bound";
    const auto start = std::chrono::steady_clock::now();
    try {
      if (config.task == "mean-est") {
        RunMeanEst(config, g, data_rng, mech_rng, row);
      } else if (config.task == "sco") {
        RunSco(config, g, data_rng, mech_rng, row);
      } else {
        RunLowerBound(config, g, mech_rng, row);
      }
    } catch (const std::exception& e) {
      row.metric_value = std::numeric_limits<double>::quiet_NaN();
      row.warnings = row.warnings.empty() ? "" : row.warnings + ";";
      row.warnings += std::string("failed: ") + e.what();
    }
    if (config.timing) {
      row.runtime_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    }
  };

  std::size_t workers = config.workers > 0
                            ? static_cast<std::size_t>(config.workers)
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, rows.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) run_one(i);
    return rows;
  }
  // Each task writes only its own slot, so the row order is fixed up front.
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) run_one(i);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw UsageError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

LinearFit FitLine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw UsageError("line fit needs at least two points");
  }
  const double m = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw UsageError("line fit needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.slope_stderr = x.size() > 2 ? std::sqrt(sse / (m - 2.0) / sxx)
                                  : std::numeric_limits<double>::infinity();
  return fit;
}

Summary Summarize(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw UsageError("nothing to summarize");
  using PointKey = std::tuple<std::string, std::string, std::string, std::int64_t,
                              double, double, double, std::int64_t>;
  std::map<PointKey, std::vector<double>> groups;
  for (const ResultRow& r : rows) {
    auto& g = groups[{r.task, r.algorithm, r.metric_name, r.d, r.k, r.rho_or_eps,
                      r.q, r.n}];
    if (std::isfinite(r.metric_value)) g.push_back(r.metric_value);
  }

  Summary out;
  for (const auto& [key, values] : groups) {
    SummaryRow s;
    std::tie(s.task, s.algorithm, s.metric_name, s.d, s.k, s.rho_or_eps, s.q, s.n) = key;
    s.count = static_cast<std::int64_t>(values.size());
    if (values.empty()) {
      s.median = s.mean = s.std_error = s.p90 =
          std::numeric_limits<double>::quiet_NaN();
    } else {
      s.median = Quantile(values, 0.5);
      s.p90 = Quantile(values, 0.9);
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      s.mean = mean;
      s.std_error = values.size() > 1
                        ? std::sqrt(ss / static_cast<double>(values.size() - 1) /
                                    static_cast<double>(values.size()))
                        : 0.0;
    }
    out.rows.push_back(s);
  }

  // Rows are sorted by series then n, so each series is a contiguous run.
  std::size_t begin = 0;
  while (begin < out.rows.size()) {
    const SummaryRow& head = out.rows[begin];
    std::size_t end = begin;
    auto same_series = [&](const SummaryRow& r) {
      return r.task == head.task && r.algorithm == head.algorithm &&
             r.metric_name == head.metric_name && r.d == head.d &&
             r.k == head.k && r.rho_or_eps == head.rho_or_eps && r.q == head.q;
    };
    while (end < out.rows.size() && same_series(out.rows[end])) ++end;
    std::vector<double> x;
    std::vector<double> y;
    bool usable = true;
    for (std::size_t i = begin; i < end; ++i) {
      if (!(out.rows[i].median > 0)) usable = false;
      x.push_back(std::log(static_cast<double>(out.rows[i].n)));
      y.push_back(std::log(out.rows[i].median));
    }
    if (usable && x.size() >= 2) {
      const LinearFit fit = FitLine(x, y);
      SlopeFit s;
      s.task = head.task;
      s.algorithm = head.algorithm;
      s.d = head.d;
      s.k = head.k;
      s.rho_or_eps = head.rho_or_eps;
      s.q = head.q;
      s.metric_name = head.metric_name;
      s.points = static_cast<std::int64_t>(x.size());
      s.slope = fit.slope;
      if (x.size() > 2) {
        boost::math::students_t t(static_cast<double>(x.size() - 2));
        const double half = boost::math::quantile(t, 0.975) * fit.slope_stderr;
        s.ci_low = fit.slope - half;
        s.ci_high = fit.slope + half;
      } else {
        s.ci_low = -std::numeric_limits<double>::infinity();
        s.ci_high = std::numeric_limits<double>::infinity();
      }
      out.slopes.push_back(s);
    }
    begin = end;
  }
  return out;
}

}  // namespace htdp
