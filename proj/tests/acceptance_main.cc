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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. `--only N` runs a single criterion (criterion 7
// needs the rows of 4-6 and runs them itself when alone).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "htdp/csv.h"
#include "htdp/experiment.h"
#include "htdp/instances.h"
#include "htdp/meanest.h"
#include "htdp/privacy.h"
#include "htdp/sco.h"
#include "htdp/smoothing.h"
#include "oracles.h"

namespace htdp {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.clear();
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void Note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string Fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// Rows from criteria 4-6, audited by criterion 7.
std::vector<ResultRow> g_private_rows;

void Keep(const std::vector<ResultRow>& rows) {
  g_private_rows.insert(g_private_rows.end(), rows.begin(), rows.end());
}

std::vector<SummaryRow> SeriesByN(const std::vector<ResultRow>& rows) {
  auto s = Summarize(rows).rows;
  std::sort(s.begin(), s.end(),
            [](const SummaryRow& a, const SummaryRow& b) { return a.n < b.n; });
  return s;
}

int NanCount(const std::vector<ResultRow>& rows) {
  int bad = 0;
  for (const auto& r : rows) bad += !std::isfinite(r.metric_value);
  return bad;
}

// ---------------------------------------------------------------------------

Outcome Criterion1() {
  Outcome o;
  const int draws = 100000;
  const std::vector<double> zero = {0.0};
  RngStream rng(101, {"acceptance", "1"});
  std::vector<double> lap(draws), gau(draws);
  for (int i = 0; i < draws; ++i) {
    lap[i] = LaplaceMechanism(zero, 1.0, 1.0, rng)[0];
    gau[i] = GaussianMechanism(zero, 1.0, 0.5, rng)[0];
  }
  const double vl = oracle::Variance(lap);
  const double vg = oracle::Variance(gau);
  // Laplace b = 1: variance 2. Gaussian sigma^2 = 1 / (2 * 0.5) = 1.
  o.Check(std::abs(vl / 2.0 - 1.0) <= 0.05, "laplace variance " + Fmt(vl));
  o.Check(std::abs(vg - 1.0) <= 0.05, "gaussian variance " + Fmt(vg));

  const double ulp = std::nextafter(1.0, 2.0) - 1.0;
  int worst_split = 0;
  int exact_steps = 0;
  for (std::int64_t t : {2, 3, 7, 10, 49, 1000, 1767, 35287}) {
    for (double rho : {1.0, 0.3, 0.5}) {
      BudgetLedger even, stepped;
      for (std::int64_t s = 1; s <= t; ++s) {
        even.Charge("even", PrivacyBudget::Concentrated(SplitBudget(rho, t)));
        stepped.Charge("step", PrivacyBudget::Concentrated(StepBudget(rho, t, s)));
      }
      const double got = Compose(even).primary();
      const int ulps = static_cast<int>(std::round(std::abs(got - rho) / (ulp * rho)));
      worst_split = std::max(worst_split, ulps);
      exact_steps += Compose(stepped).primary() == rho;
    }
  }
  o.Check(worst_split <= 1, "rho/T composition off by " + std::to_string(worst_split) + " ulp");
  o.Check(exact_steps == 24, "step budgets exact in " + std::to_string(exact_steps) + "/24");
  o.Check(PureToCdp(1.0) == 0.5, "pure_to_cdp(1) = " + Fmt(PureToCdp(1.0), 17));
  o.Note("var lap " + Fmt(vl) + " gau " + Fmt(vg) + ", compose <= " +
         std::to_string(worst_split) + " ulp");
  return o;
}

Outcome Criterion2() {
  Outcome o;
  // Point mass.
  const std::vector<double> point = {2.5, -7.0, 1e3};
  std::vector<double> rows;
  for (int i = 0; i < 500; ++i) rows.insert(rows.end(), point.begin(), point.end());
  HdmeConfig hc;
  hc.tau = 400.0;
  o.Check(Hdme(SampleView(rows, 500, 3), hc).value == point, "point mass not exact");

  // Containment on heavy data with shifted centres.
  int outside_h = 0, outside_n = 0;
  const auto dist = MakeStudentT(2.0, 4, {50.0, -30.0, 0.0, 5.0});
  for (int rep = 0; rep < 200; ++rep) {
    RngStream rng(202, {"containment"});
    RngStream r = rng.Child(static_cast<std::uint64_t>(rep));
    const Dataset data = dist->SampleDataset(64 + rep, r);
    HdmeConfig h;
    h.tau = 0.5 + rep * 0.1;
    h.center = (rep % 5) - 2.0;
    for (double v : Hdme(data, h).value) {
      outside_h += v < h.center - 3 * h.tau || v > h.center + 3 * h.tau;
    }
    NsmeConfig nc;
    nc.tau = 0.5 + rep * 0.1;
    nc.smoothing_variance = 0.25 * (rep % 5);
    for (double v : Nsme(data, nc).value) {
      outside_n += std::abs(v) > nc.tau * (2.0 * std::sqrt(2.0) / 3.0);
    }
  }
  o.Check(outside_h == 0, std::to_string(outside_h) + " hdme coords outside");
  o.Check(outside_n == 0, std::to_string(outside_n) + " nsme coords outside");

  // 250 x-values times 4 smoothing variances.
  double worst = 0.0;
  const double tau = 3.0;
  for (double c : {0.01, 0.25, 1.0, 4.0}) {
    for (int i = 0; i < 250; ++i) {
      const double x = tau * (-30.0 + 60.0 * i / 249.0);
      worst = std::max(worst, std::abs(SmoothedPhi(x, tau, c) -
                                        oracle::SmoothedPhi(x, tau, c)));
    }
  }
  o.Check(worst <= 1e-9, "smoothed phi max error " + Fmt(worst));
  o.Note("smoothed phi max error " + Fmt(worst, 3) + " over 1000 points");
  return o;
}

Outcome Criterion3() {
  Outcome o;
  auto bias = [](double p, double k, double tau) {
    const PackingDistribution q(DefaultPackingPattern(8), p, k);
    return std::abs(q.Mean()[0] - q.TruncatedMean(tau)[0]);
  };
  // C from the worst bias at tau = 10, maximized over p by golden section on
  // log p, taken over all k.
  const double tau0 = 10.0;
  double c_fit = 0.0;
  for (double k : {2.0, 3.0, 4.0}) {
    double a = std::log(1e-16), b = 0.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f = [&](double lp) { return bias(std::exp(lp), k, tau0); };
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = f(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = f(x1);
      }
    }
    const double worst = std::max(f1, f2);
    // 3 (C / tau)^{k-1} = worst.
    c_fit = std::max(c_fit, tau0 * std::pow(worst / 3.0, 1.0 / (k - 1.0)));
  }
  int checked = 0, violations = 0;
  double tightest = 0.0;
  for (double tau : {10.0, 20.0, 40.0, 80.0}) {
    for (double k : {2.0, 3.0, 4.0}) {
      const double bound = 3.0 * std::pow(c_fit / tau, k - 1.0);
      for (int i = 0; i <= 2000; ++i) {
        const double p = std::pow(10.0, -16.0 + 16.0 * i / 2000.0);
        const double b = bias(p, k, tau);
        // Library value against the two-point closed form.
        const double want = std::abs(std::pow(p, (k - 1.0) / k) -
                                     oracle::TwoPointTruncatedMean(p, k, tau));
        if (std::abs(b - want) > 1e-15) {
          o.Check(false, "truncated mean disagrees at p=" + Fmt(p));
        }
        // One part in 1e9 for rounding in the maximizer.
        violations += b > bound * (1.0 + 1e-9);
        tightest = std::max(tightest, b / bound);
        ++checked;
      }
    }
  }
  o.Check(violations == 0, std::to_string(violations) + " bound violations");
  o.Note("C = " + Fmt(c_fit, 6) + ", " + std::to_string(checked) +
         " points, max bias/bound " + Fmt(tightest, 6));
  return o;
}

double PredictedError(double n, double d, double k, double rho) {
  return std::sqrt(d / n) +
         std::sqrt(d) * std::pow(std::sqrt(d) / (std::sqrt(rho) * n), (k - 1.0) / k);
}

Outcome Criterion4() {
  Outcome o;
  ExperimentConfig c;
  c.task = "mean-est";
  c.algorithm = "cdp_hdme";
  c.n = {1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14, 1 << 15, 1 << 16};
  c.d = {5};
  c.k = {2.0};
  c.rho = {1.0};
  c.trials = 200;
  c.seed = 4;
  const auto rows = RunExperiment(c);
  Keep(rows);
  o.Check(NanCount(rows) == 0, std::to_string(NanCount(rows)) + " failed rows");
  const auto s = SeriesByN(rows);

  std::vector<double> x, y, yp;
  std::string regimes;
  for (const auto& r : s) {
    const double n = static_cast<double>(r.n);
    x.push_back(std::log(n));
    y.push_back(std::log(r.median));
    yp.push_back(std::log(PredictedError(n, 5.0, 2.0, 1.0)));
    const double stat = std::sqrt(5.0 / n);
    regimes += stat >= PredictedError(n, 5.0, 2.0, 1.0) - stat ? "s" : "p";
  }
  const double slope = FitLine(x, y).slope;
  const double predicted = FitLine(x, yp).slope;
  o.Check(std::abs(slope - predicted) <= 0.15,
          "slope " + Fmt(slope) + " vs predicted " + Fmt(predicted));
  for (std::size_t i = 0; i < s.size(); ++i) {
    o.Check(std::isfinite(s[i].p90), "p90 not finite at n=" + std::to_string(s[i].n));
    if (i > 0) {
      o.Check(s[i].p90 < s[i - 1].p90, "p90 rises at n=" + std::to_string(s[i].n));
    }
  }
  o.Note("slope " + Fmt(slope) + " vs predicted " + Fmt(predicted) + " (regimes " +
         regimes + "), p90 " + Fmt(s.front().p90) + " -> " + Fmt(s.back().p90));
  return o;
}

Outcome Criterion5() {
  Outcome o;
  const double eps = 1.0;
  ExperimentConfig c;
  c.task = "mean-est";
  c.n = {1 << 14};
  c.d = {4, 16, 64};
  c.k = {2.0};
  c.trials = 200;
  c.seed = 5;
  c.eps = {eps};
  c.rho = {eps * eps / 2.0};
  c.algorithm = "dp_hdme";
  const auto pure = RunExperiment(c);
  c.algorithm = "cdp_hdme";
  const auto cdp = RunExperiment(c);
  Keep(pure);
  Keep(cdp);
  o.Check(NanCount(pure) + NanCount(cdp) == 0, "failed rows");
  auto medians = [](const std::vector<ResultRow>& rows) {
    std::map<std::int64_t, double> m;
    for (const auto& s : Summarize(rows).rows) m[s.d] = s.median;
    return m;
  };
  const auto mp = medians(pure), mc = medians(cdp);
  double prev = 0.0;
  std::string ratios;
  for (std::int64_t d : {4, 16, 64}) {
    const double ratio = mp.at(d) / mc.at(d);
    o.Check(ratio > prev, "ratio not increasing at d=" + std::to_string(d));
    prev = ratio;
    ratios += (ratios.empty() ? "" : ", ") + Fmt(ratio);
  }
  o.Note("dp/cdp median ratio " + ratios + " at d = 4, 16, 64");
  return o;
}

std::vector<double> ColumnMeans(const Dataset& data) {
  std::vector<double> m(data.d(), 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < data.d(); ++j) m[j] += data.at(i, j);
  }
  for (double& v : m) v /= static_cast<double>(data.n());
  return m;
}

double Norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Outcome Criterion6() {
  Outcome o;
  // (a) Noiseless oracle against the closed form. With w0 = 0 and the ball
  // centred at the origin the iterates stay on the ray towards the sample
  // mean: a_t = |xbar| (1 - (1 - eta)^t) until that reaches the radius.
  {
    const auto dist = MakeStudentT(2.0, 2, {0.3, -0.4});
    RngStream rng(6, {"contraction"});
    const Dataset data = dist->SampleDataset(4096, rng);
    const auto xbar = ColumnMeans(data);
    const double norm = Norm(xbar);
    QuadraticLoss loss{LossParams{}};
    double worst = 0.0;
    for (double radius : {10.0, 0.75 * norm}) {
      const Ball ball({0.0, 0.0}, radius);
      const double eta = 0.3;
      const std::vector<double> w0 = {0.0, 0.0};
      const auto traj = Scof(data, loss, ball, ExactMeanOracle(),
                             StepSchedule::Constant(eta), 60, ScoMode::kConvex, w0, rng);
      for (std::size_t t = 0; t < traj.iterates.size(); ++t) {
        const double a = std::min(
            radius, norm * (1.0 - std::pow(1.0 - eta, static_cast<double>(t))));
        for (std::size_t j = 0; j < 2; ++j) {
          worst = std::max(worst, std::abs(traj.iterates[t][j] - a * xbar[j] / norm));
        }
      }
    }
    o.Check(worst <= 1e-12, "exact-oracle deviation " + Fmt(worst));
    o.Note("(a) max deviation " + Fmt(worst, 3));
  }

  // (b), (c)
  ExperimentConfig c;
  c.task = "sco";
  c.loss = "quadratic";
  c.distribution = "student_t";
  c.n = {1 << 10, 1 << 12, 1 << 14, 1 << 16};
  c.d = {2};
  c.k = {2.0};
  c.rho = {1.0};
  c.q = {0.5};
  c.trials = 50;
  c.seed = 6;
  c.radius = 0.75;
  c.mean_norm = 0.675;
  std::map<std::string, double> at_max;
  std::string curves;
  for (const char* alg : {"cdp_sco_convex_hdme", "cdp_sco_convex_nsme",
                          "cdp_sco_strongly_convex"}) {
    c.algorithm = alg;
    const auto rows = RunExperiment(c);
    Keep(rows);
    o.Check(NanCount(rows) == 0, std::string(alg) + " failed rows");
    const auto s = SeriesByN(rows);
    int inversions = 0;
    std::string curve;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i > 0 && s[i].median > s[i - 1].median) ++inversions;
      curve += (curve.empty() ? "" : " ") + Fmt(s[i].median, 3);
    }
    o.Check(inversions <= 1, std::string(alg) + " has " + std::to_string(inversions) +
                                 " inversions (" + curve + ")");
    at_max[alg] = s.back().median;
    curves += std::string(curves.empty() ? "" : ", ") + alg + " [" + curve + "]";
  }
  o.Check(at_max["cdp_sco_strongly_convex"] < at_max["cdp_sco_convex_hdme"],
          "strongly convex " + Fmt(at_max["cdp_sco_strongly_convex"]) +
              " not below convex " + Fmt(at_max["cdp_sco_convex_hdme"]) + " at n=2^16");
  o.Note(curves);
  return o;
}

Outcome Criterion7() {
  Outcome o;
  if (g_private_rows.empty()) {
    Criterion4();
    Criterion5();
    Criterion6();
  }
  std::size_t mismatched = 0;
  for (const auto& r : g_private_rows) mismatched += r.budget_spent != r.rho_or_eps;
  o.Check(mismatched == 0, std::to_string(mismatched) + " rows spend a different budget");
  o.Note(std::to_string(g_private_rows.size()) + " private rows audited");
  return o;
}

Outcome Criterion8() {
  Outcome o;
  for (int d : {8, 16}) {
    const auto code = GvCode(d);
    const auto words = oracle::ConstantWeightWords(d, d / 2);
    const std::set<std::vector<int>> universe(words.begin(), words.end());
    int bad_weight = 0, bad_distance = 0, min_distance = d;
    for (std::size_t a = 0; a < code.size(); ++a) {
      bad_weight += !universe.count(code[a]);
      for (std::size_t b = a + 1; b < code.size(); ++b) {
        const int h = oracle::Hamming(code[a], code[b]);
        bad_distance += h < d / 8;
        min_distance = std::min(min_distance, h);
      }
    }
    o.Check(bad_weight == 0 && bad_distance == 0,
            "gv_code(" + std::to_string(d) + ") violates constraints");
    o.Check(code.size() >= GvTarget(d), "gv_code(" + std::to_string(d) + ") too small");
    o.Note("gv_code(" + std::to_string(d) + "): " + std::to_string(code.size()) +
           " words of " + std::to_string(universe.size()) + ", min distance " +
           std::to_string(min_distance));
  }

  FanoParams f;
  f.r = 2.0;
  f.beta_kl = 0.1;
  f.rho = 1.0;
  f.n = 100;
  f.alpha = 0.0;
  double gap = 0.0;
  double prev = -1.0;
  for (double m : {1e2, 1e6, 1e20, 1e100, 1e300}) {
    f.m_count = m;
    const double b = FanoBound(f);
    o.Check(b > prev, "fano bound not increasing in M");
    prev = b;
    gap = f.r / 2.0 - b;
  }
  o.Check(gap >= 0 && gap < 1e-2, "fano gap to r/2 at M=1e300 is " + Fmt(gap));
  f.m_count = 1e300;
  double alpha_prev = -1.0;
  for (double alpha : {1e-1, 1e-3, 1e-6, 0.0}) {
    f.alpha = alpha;
    const double b = FanoBound(f);
    o.Check(b >= alpha_prev, "fano bound not increasing as alpha -> 0");
    alpha_prev = b;
  }
  o.Note("fano r/2 - bound = " + Fmt(gap, 3));

  // The GV code at d = 8 has two words; every weight-4 pattern is checked too.
  const auto words8 = oracle::ConstantWeightWords(8, 4);
  int pairs = 0, off = 0;
  for (double p : {1e-3, 0.1, 0.5, 0.9}) {
    for (std::size_t a = 0; a < words8.size(); ++a) {
      for (std::size_t b = 0; b < words8.size(); ++b) {
        if (a == b) continue;
        const auto s = OnSharedSupport(PackingDistribution(words8[a], p, 2.0),
                                       PackingDistribution(words8[b], p, 2.0));
        off += TvAndKl(s.p, s.q).tv != p;
        ++pairs;
      }
    }
  }
  o.Check(off == 0, std::to_string(off) + " pairs with TV != p");
  o.Note("TV = p on " + std::to_string(pairs) + " ordered pairs");
  return o;
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome Criterion9() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "htdp_acceptance_9";
  fs::create_directories(dir);
  struct Sweep {
    std::string name;
    std::string json;
  };
  const std::vector<Sweep> sweeps = {
      {"mean", R"({"task": "mean-est", "algorithm": "cdp_nsme", "n": [512, 2048],
                  "d": [2, 5], "rho": [0.5, 1.0], "q": [0.5], "trials": 5, "seed": 9})"},
      {"sco", R"({"task": "sco", "algorithm": "cdp_sco_strongly_convex",
                 "n": [1024, 4096], "d": [2], "rho": [1.0], "trials": 4, "seed": 9,
                 "radius": 0.75, "mean_norm": 0.675})"},
      {"lower", R"({"task": "lower-bound", "algorithm": "fano",
                   "distribution": "packing:p=0.05", "n": [10, 100], "d": [8, 16],
                   "rho": [0.5, 1.0], "seed": 9})"}};
  int identical = 0;
  for (const auto& s : sweeps) {
    const fs::path cfg = dir / (s.name + ".json");
    std::ofstream(cfg) << s.json;
    std::vector<std::string> outputs;
    for (int workers : {1, 3, 8}) {
      const fs::path out = dir / (s.name + "_" + std::to_string(workers) + ".csv");
      const std::string cmd = std::string(HTDP_CLI_PATH) + " sweep --config " +
                              cfg.string() + " --workers " + std::to_string(workers) +
                              " --out " + out.string();
      const int status = std::system(cmd.c_str());
      o.Check(WIFEXITED(status) && WEXITSTATUS(status) == 0,
              s.name + " sweep failed with workers=" + std::to_string(workers));
      outputs.push_back(Slurp(out));
    }
    const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2] &&
                      !outputs[0].empty();
    o.Check(same, s.name + " output differs across worker counts");
    identical += same;
  }
  fs::remove_all(dir);
  o.Note(std::to_string(identical) + "/3 sweeps byte-identical for workers 1, 3, 8");
  return o;
}

struct Criterion {
  int id;
  double limit_seconds;  // 0: no limit
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace htdp

int main(int argc, char** argv) {
  using namespace htdp;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<Criterion> criteria = {
      {1, 30, Criterion1},  {2, 10, Criterion2},  {3, 5, Criterion3},
      {4, 600, Criterion4}, {5, 600, Criterion5}, {6, 900, Criterion6},
      {7, 0, Criterion7},   {8, 10, Criterion8},  {9, 0, Criterion9}};
  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      o.Check(false, "over the " + Fmt(c.limit_seconds) + " s limit");
    }
    failed += !o.pass;
    std::printf("criterion %d: %s - %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
