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

#include "htdp/core.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace htdp {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t DeriveSeed(std::uint64_t master_seed,
                         const std::vector<std::string>& path) {
  std::uint64_t h = SplitMix64(master_seed);
  for (const auto& label : path) {
    // Length is mixed in so ("ab","c") and ("a","bc") differ.
    h = SplitMix64(h ^ Fnv1a(label));
    h = SplitMix64(h ^ label.size());
  }
  return h;
}

}  // namespace

SampleView::SampleView(std::span<const double> values, std::size_t n,
                       std::size_t d)
    : values_(values), n_(n), d_(d) {
  if (values.size() != n * d) {
    throw UsageError("sample view size does not match n*d");
  }
}

SampleView SampleView::rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > n_) throw UsageError("row range out of bounds");
  return SampleView(values_.subspan(begin * d_, (end - begin) * d_),
                    end - begin, d_);
}

Dataset::Dataset(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), values_(std::move(values)) {
  if (n_ < 1 || d_ < 1) throw UsageError("dataset needs n >= 1 and d >= 1");
  if (values_.size() != n_ * d_) {
    throw UsageError("dataset values do not match n*d");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw UsageError("dataset entries must be finite");
  }
}

Dataset Dataset::FromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw UsageError("dataset needs at least one row");
  const std::size_t d = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw UsageError("inconsistent row dimension");
    values.insert(values.end(), r.begin(), r.end());
  }
  return Dataset(rows.size(), d, std::move(values));
}

PrivacyBudget PrivacyBudget::Pure(double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw UsageError("epsilon must be positive");
  }
  return PrivacyBudget(PureDp{epsilon});
}

PrivacyBudget PrivacyBudget::Concentrated(double rho) {
  if (!(rho > 0) || !std::isfinite(rho)) {
    throw UsageError("rho must be positive");
  }
  return PrivacyBudget(Zcdp{rho});
}

PrivacyBudget PrivacyBudget::Approximate(double epsilon, double delta) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw UsageError("epsilon must be positive");
  }
  if (!(delta > 0 && delta < 1)) throw UsageError("delta must lie in (0,1)");
  return PrivacyBudget(ApproxDp{epsilon, delta});
}

double PrivacyBudget::primary() const {
  return std::visit(
      [](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Zcdp>) {
          return b.rho;
        } else {
          return b.epsilon;
        }
      },
      value_);
}

std::string PrivacyBudget::ToString() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, PureDp>) {
          os << "eps=" << b.epsilon;
        } else if constexpr (std::is_same_v<T, Zcdp>) {
          os << "rho=" << b.rho;
        } else {
          os << "eps=" << b.epsilon << ";delta=" << b.delta;
        }
      },
      value_);
  return os.str();
}

bool operator==(const PrivacyBudget& a, const PrivacyBudget& b) {
  if (a.value_.index() != b.value_.index()) return false;
  if (a.is_approx()) {
    const auto& x = std::get<ApproxDp>(a.value_);
    const auto& y = std::get<ApproxDp>(b.value_);
    return x.epsilon == y.epsilon && x.delta == y.delta;
  }
  return a.primary() == b.primary();
}

void MomentSpec::Validate() const {
  if (!(k >= 2)) throw UsageError("moment order k must be >= 2");
  if (!(gamma > 0)) throw UsageError("moment bound gamma must be positive");
}

RngStream::RngStream(std::uint64_t master_seed, std::vector<std::string> path)
    : master_seed_(master_seed),
      path_(std::move(path)),
      derived_seed_(DeriveSeed(master_seed_, path_)),
      engine_(derived_seed_) {}

RngStream RngStream::Child(std::string_view label) const {
  std::vector<std::string> child_path = path_;
  child_path.emplace_back(label);
  return RngStream(master_seed_, std::move(child_path));
}

RngStream RngStream::Child(std::uint64_t index) const {
  return Child(std::to_string(index));
}

double RngStream::Uniform() {
  // 53 random bits, shifted off zero.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::Normal() { return normal_(engine_); }

double RngStream::Laplace(double scale) {
  const double u = Uniform() - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0 ? -mag : mag;
}

double Median(std::span<const double> values) {
  if (values.empty()) throw UsageError("median of an empty list");
  std::vector<double> v(values.begin(), values.end());
  for (double x : v) {
    if (!std::isfinite(x)) throw UsageError("median input must be finite");
  }
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

double Clip(double x, double lo, double hi) {
  if (lo > hi) throw UsageError("clip interval has lo > hi");
  return std::min(hi, std::max(lo, x));
}

std::vector<RowRange> BatchRanges(std::size_t n, std::size_t m) {
  if (m < 1) throw UsageError("batch count must be >= 1");
  if (n < m) throw UsageError("fewer samples than batches");
  const std::size_t size = n / m;
  std::vector<RowRange> ranges;
  ranges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t begin = i * size;
    const std::size_t end = (i + 1 == m) ? n : begin + size;
    ranges.push_back({begin, end});
  }
  return ranges;
}

std::vector<Dataset> SplitBatches(const Dataset& dataset, std::size_t m) {
  std::vector<Dataset> batches;
  for (const RowRange& r : BatchRanges(dataset.n(), m)) {
    auto first = dataset.values().begin() + r.begin * dataset.d();
    auto last = dataset.values().begin() + r.end * dataset.d();
    batches.emplace_back(r.size(), dataset.d(), std::vector<double>(first, last));
  }
  return batches;
}

}  // namespace htdp
