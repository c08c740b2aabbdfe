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

// CSV and JSON encodings of result and summary rows. Doubles are written in
// the shortest form that parses back to the same value.

#ifndef HTDP_CSV_H_
#define HTDP_CSV_H_

#include <string>
#include <string_view>
#include <vector>

#include "htdp/experiment.h"

namespace htdp {

inline constexpr std::string_view kResultHeader =
    "task,algorithm,n,d,k,rho_or_eps,tau,T,eta,q,trial,seed,metric_name,"
    "metric_value,stderr,budget_spent,runtime_ms,warnings";

std::string FormatDouble(double v);
double ParseDouble(std::string_view text);

std::string RowsToCsv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> RowsFromCsv(std::string_view text);

// One JSON object per line, keys in header order.
std::string RowsToJsonLines(const std::vector<ResultRow>& rows);

std::string SummaryToCsv(const std::vector<SummaryRow>& rows);
std::string SlopesToCsv(const std::vector<SlopeFit>& fits);
std::string SummaryToJsonLines(const Summary& summary);

// Splits one CSV record, honouring double quotes.
std::vector<std::string> SplitCsvLine(std::string_view line);

}  // namespace htdp

#endif  // HTDP_CSV_H_
