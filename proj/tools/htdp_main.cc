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

// Command-line experiment harness.
//
//   htdp mean-est --config run.json --n 1024,4096 --trials 20 --out rows.csv
//   htdp sco --algorithm cdp_sco_strongly_convex --n 65536 --d 2
//   htdp lower-bound --distribution packing:p=0.01 --d 16
//   htdp sweep --config sweep.json
//   htdp summarize --in rows.csv --slopes slopes.csv
//
// Exit status: 0 on success, 2 for invalid configuration, 3 for runtime
// failures.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "htdp/core.h"
#include "htdp/csv.h"
#include "htdp/experiment.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
  std::string config_path;
  std::vector<std::int64_t> n;
  std::vector<std::int64_t> d;
  std::vector<double> k;
  std::vector<double> rho;
  std::vector<double> eps;
  std::vector<double> q;
  std::optional<std::int64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algorithm;
  std::optional<std::string> distribution;
  std::optional<std::string> loss;
  std::optional<std::string> calibration;
  std::optional<std::string> out;
  std::optional<int> workers;
  bool timing = false;
  std::string format = "csv";
};

void AddRunOptions(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--n", o.n, "sample sizes (comma separated)")->delimiter(',');
  cmd->add_option("--d", o.d, "dimensions")->delimiter(',');
  cmd->add_option("--k", o.k, "moment orders")->delimiter(',');
  cmd->add_option("--rho", o.rho, "zCDP budgets")->delimiter(',');
  cmd->add_option("--eps", o.eps, "pure-DP budgets")->delimiter(',');
  cmd->add_option("--q", o.q, "NSME exponents")->delimiter(',');
  cmd->add_option("--trials", o.trials, "trials per grid point");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--algorithm", o.algorithm, "algorithm id");
  cmd->add_option("--distribution", o.distribution,
                  "data distribution, e.g. student_t or packing:p=0.1");
  cmd->add_option("--loss", o.loss, "quadratic | linear | linear_regression");
  cmd->add_option("--calibration", o.calibration, "NSME noise calibration")
      ->check(CLI::IsMember({"paper", "exact"}));
  cmd->add_option("--out", o.out, "output file (stdout when omitted)");
  cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
  cmd->add_flag("--timing", o.timing, "record wall-clock runtime_ms");
  cmd->add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
}

htdp::ExperimentConfig LoadConfig(const Overrides& o,
                                  const std::optional<std::string>& task) {
  nlohmann::json j = nlohmann::json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw htdp::UsageError("cannot read config " + o.config_path);
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw htdp::UsageError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  htdp::ExperimentConfig c = htdp::ExperimentConfig::FromJson(j);
  if (task) {
    if (j.contains("task") && c.task != *task) {
      throw htdp::UsageError("config task '" + c.task + "' conflicts with subcommand " +
                             *task);
    }
    c.task = *task;
    if (!j.contains("algorithm")) {
      c.algorithm = htdp::ExperimentConfig::Algorithms(c.task).at(
          c.task == "mean-est" ? 1 : 0);
    }
  }
  if (!o.n.empty()) c.n = o.n;
  if (!o.d.empty()) c.d = o.d;
  if (!o.k.empty()) c.k = o.k;
  if (!o.rho.empty()) c.rho = o.rho;
  if (!o.eps.empty()) c.eps = o.eps;
  if (!o.q.empty()) c.q = o.q;
  if (o.trials) c.trials = *o.trials;
  if (o.seed) c.seed = *o.seed;
  if (o.algorithm) c.algorithm = *o.algorithm;
  if (o.distribution) c.distribution = *o.distribution;
  if (o.loss) c.loss = *o.loss;
  if (o.calibration) c.calibration = htdp::ParseCalibration(*o.calibration);
  if (o.out) c.out = *o.out;
  if (o.workers) c.workers = *o.workers;
  if (o.timing) c.timing = true;
  c.Validate();
  return c;
}

void Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw htdp::UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int RunTask(const Overrides& o, const std::optional<std::string>& task) {
  htdp::ExperimentConfig config;
  try {
    config = LoadConfig(o, task);
  } catch (const htdp::UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const auto rows = htdp::RunExperiment(config);
  Emit(config.out, o.format == "json" ? htdp::RowsToJsonLines(rows)
                                      : htdp::RowsToCsv(rows));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private mean estimation and optimization under heavy tails"};
  app.require_subcommand(1);

  Overrides mean_est, sco, lower_bound, sweep;
  AddRunOptions(app.add_subcommand("mean-est", "private mean estimation trials"),
                mean_est);
  AddRunOptions(app.add_subcommand("sco", "private stochastic convex optimization"),
                sco);
  AddRunOptions(app.add_subcommand("lower-bound", "packing and Fano bounds"),
                lower_bound);
  AddRunOptions(app.add_subcommand("sweep", "run the task named in the config"),
                sweep);

  std::string summarize_in;
  std::string summarize_out;
  std::string summarize_slopes;
  std::string summarize_format = "csv";
  auto* summarize = app.add_subcommand("summarize", "aggregate result rows");
  summarize->add_option("--in", summarize_in, "result CSV")->required();
  summarize->add_option("--out", summarize_out, "summary output (stdout default)");
  summarize->add_option("--slopes", summarize_slopes, "log-log slope CSV");
  summarize->add_option("--format", summarize_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand("mean-est")) return RunTask(mean_est, "mean-est");
    if (app.got_subcommand("sco")) return RunTask(sco, "sco");
    if (app.got_subcommand("lower-bound")) return RunTask(lower_bound, "lower-bound");
    if (app.got_subcommand("sweep")) return RunTask(sweep, std::nullopt);

    std::vector<htdp::ResultRow> rows;
    htdp::Summary summary;
    try {
      rows = htdp::RowsFromCsv(ReadAll(summarize_in));
      summary = htdp::Summarize(rows);
    } catch (const htdp::UsageError& e) {
      std::cerr << "input error: " << e.what() << "\n";
      return kExitConfig;
    }
    if (summarize_format == "json") {
      Emit(summarize_out, htdp::SummaryToJsonLines(summary));
    } else {
      Emit(summarize_out, htdp::SummaryToCsv(summary.rows));
      if (!summarize_slopes.empty()) {
        Emit(summarize_slopes, htdp::SlopesToCsv(summary.slopes));
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
