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

#include "htdp/csv.h"

#include <charconv>
#include <cmath>
#include <system_error>

#include <json.hpp>

namespace htdp {
namespace {

constexpr std::size_t kResultColumns = 18;

std::string Quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

template <typename Int>
std::string FormatInt(Int v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

template <typename Int>
Int ParseInt(std::string_view text) {
  Int v{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw UsageError("malformed integer: " + std::string(text));
  }
  return v;
}

// Splits text into records of fields; quoted fields may contain separators
// and line breaks.
std::vector<std::vector<std::string>> ParseRecords(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    any = true;
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw UsageError("unterminated quoted CSV field");
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

nlohmann::ordered_json RowJson(const ResultRow& r) {
  nlohmann::ordered_json j;
  j["task"] = r.task;
  j["algorithm"] = r.algorithm;
  j["n"] = r.n;
  j["d"] = r.d;
  j["k"] = r.k;
  j["rho_or_eps"] = r.rho_or_eps;
  j["tau"] = r.tau;
  j["T"] = r.T;
  j["eta"] = r.eta;
  j["q"] = r.q;
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["metric_name"] = r.metric_name;
  j["metric_value"] = r.metric_value;
  j["stderr"] = r.std_error;
  j["budget_spent"] = r.budget_spent;
  j["runtime_ms"] = r.runtime_ms;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double ParseDouble(std::string_view text) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw UsageError("malformed number: " + std::string(text));
  }
  return v;
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  auto records = ParseRecords(line);
  if (records.empty()) return {""};
  if (records.size() != 1) throw UsageError("expected a single CSV record");
  return records.front();
}

std::string RowsToCsv(const std::vector<ResultRow>& rows) {
  std::string out(kResultHeader);
  out += '\n';
  for (const ResultRow& r : rows) {
    out += Quote(r.task) + ',' + Quote(r.algorithm) + ',' + FormatInt(r.n) + ',' +
           FormatInt(r.d) + ',' + FormatDouble(r.k) + ',' +
           FormatDouble(r.rho_or_eps) + ',' + FormatDouble(r.tau) + ',' +
           FormatInt(r.T) + ',' + FormatDouble(r.eta) + ',' + FormatDouble(r.q) +
           ',' + FormatInt(r.trial) + ',' + FormatInt(r.seed) + ',' +
           Quote(r.metric_name) + ',' + FormatDouble(r.metric_value) + ',' +
           FormatDouble(r.std_error) + ',' + FormatDouble(r.budget_spent) + ',' +
           FormatDouble(r.runtime_ms) + ',' + Quote(r.warnings) + '\n';
  }
  return out;
}

std::vector<ResultRow> RowsFromCsv(std::string_view text) {
  const auto records = ParseRecords(text);
  if (records.empty()) throw UsageError("empty CSV input");
  std::string header;
  for (std::size_t i = 0; i < records[0].size(); ++i) {
    if (i) header += ',';
    header += records[0][i];
  }
  if (header != kResultHeader) throw UsageError("unexpected CSV header: " + header);
  std::vector<ResultRow> rows;
  for (std::size_t line = 1; line < records.size(); ++line) {
    const auto& f = records[line];
    if (f.size() != kResultColumns) {
      throw UsageError("CSV record " + std::to_string(line) + " has " +
                       std::to_string(f.size()) + " fields");
    }
    ResultRow r;
    r.task = f[0];
    r.algorithm = f[1];
    r.n = ParseInt<std::int64_t>(f[2]);
    r.d = ParseInt<std::int64_t>(f[3]);
    r.k = ParseDouble(f[4]);
    r.rho_or_eps = ParseDouble(f[5]);
    r.tau = ParseDouble(f[6]);
    r.T = ParseInt<std::int64_t>(f[7]);
    r.eta = ParseDouble(f[8]);
    r.q = ParseDouble(f[9]);
    r.trial = ParseInt<std::int64_t>(f[10]);
    r.seed = ParseInt<std::uint64_t>(f[11]);
    r.metric_name = f[12];
    r.metric_value = ParseDouble(f[13]);
    r.std_error = ParseDouble(f[14]);
    r.budget_spent = ParseDouble(f[15]);
    r.runtime_ms = ParseDouble(f[16]);
    r.warnings = f[17];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string RowsToJsonLines(const std::vector<ResultRow>& rows) {
  std::string out;
  for (const ResultRow& r : rows) {
    out += RowJson(r).dump();
    out += '\n';
  }
  return out;
}

std::string SummaryToCsv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "task,algorithm,n,d,k,rho_or_eps,q,metric_name,count,median,mean,stderr,"
      "p90\n";
  for (const SummaryRow& s : rows) {
    out += Quote(s.task) + ',' + Quote(s.algorithm) + ',' + FormatInt(s.n) + ',' +
           FormatInt(s.d) + ',' + FormatDouble(s.k) + ',' +
           FormatDouble(s.rho_or_eps) + ',' + FormatDouble(s.q) + ',' +
           Quote(s.metric_name) + ',' + FormatInt(s.count) + ',' +
           FormatDouble(s.median) + ',' + FormatDouble(s.mean) + ',' +
           FormatDouble(s.std_error) + ',' + FormatDouble(s.p90) + '\n';
  }
  return out;
}

std::string SlopesToCsv(const std::vector<SlopeFit>& fits) {
  std::string out =
      "task,algorithm,d,k,rho_or_eps,q,metric_name,points,slope,ci_low,ci_high\n";
  for (const SlopeFit& s : fits) {
    out += Quote(s.task) + ',' + Quote(s.algorithm) + ',' + FormatInt(s.d) + ',' +
           FormatDouble(s.k) + ',' + FormatDouble(s.rho_or_eps) + ',' +
           FormatDouble(s.q) + ',' + Quote(s.metric_name) + ',' +
           FormatInt(s.points) + ',' + FormatDouble(s.slope) + ',' +
           FormatDouble(s.ci_low) + ',' + FormatDouble(s.ci_high) + '\n';
  }
  return out;
}

std::string SummaryToJsonLines(const Summary& summary) {
  std::string out;
  for (const SummaryRow& s : summary.rows) {
    nlohmann::ordered_json j;
    j["task"] = s.task;
    j["algorithm"] = s.algorithm;
    j["n"] = s.n;
    j["d"] = s.d;
    j["k"] = s.k;
    j["rho_or_eps"] = s.rho_or_eps;
    j["q"] = s.q;
    j["metric_name"] = s.metric_name;
    j["count"] = s.count;
    j["median"] = s.median;
    j["mean"] = s.mean;
    j["stderr"] = s.std_error;
    j["p90"] = s.p90;
    out += j.dump() + '\n';
  }
  for (const SlopeFit& s : summary.slopes) {
    nlohmann::ordered_json j;
    j["task"] = s.task;
    j["algorithm"] = s.algorithm;
    j["d"] = s.d;
    j["k"] = s.k;
    j["rho_or_eps"] = s.rho_or_eps;
    j["q"] = s.q;
    j["metric_name"] = s.metric_name;
    j["points"] = s.points;
    j["slope"] = s.slope;
    j["ci_low"] = s.ci_low;
    j["ci_high"] = s.ci_high;
    out += j.dump() + '\n';
  }
  return out;
}

}  // namespace htdp
