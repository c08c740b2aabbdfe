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

#ifndef HTDP_CORE_H_
#define HTDP_CORE_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace htdp {

// Raised when a caller violates an operation's preconditions.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-owning row-major view over an n x d block of samples.
class SampleView {
 public:
  SampleView() = default;
  SampleView(std::span<const double> values, std::size_t n, std::size_t d);

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t i) const {
    return values_.subspan(i * d_, d_);
  }
  double at(std::size_t i, std::size_t j) const { return values_[i * d_ + j]; }
  // Rows [begin, end).
  SampleView rows(std::size_t begin, std::size_t end) const;

 private:
  std::span<const double> values_;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
};

// Owning n x d sample matrix. Every entry is finite, n >= 1 and d >= 1.
class Dataset {
 public:
  Dataset(std::size_t n, std::size_t d, std::vector<double> values);
  static Dataset FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t i) const { return view().row(i); }
  double at(std::size_t i, std::size_t j) const { return values_[i * d_ + j]; }

  SampleView view() const { return SampleView(values_, n_, d_); }
  operator SampleView() const { return view(); }  // NOLINT

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> values_;
};

struct PureDp {
  double epsilon;
};
struct Zcdp {
  double rho;
};
struct ApproxDp {
  double epsilon;
  double delta;
};

// A privacy guarantee in one of the three supported notions.
class PrivacyBudget {
 public:
  using Variant = std::variant<PureDp, Zcdp, ApproxDp>;

  static PrivacyBudget Pure(double epsilon);
  static PrivacyBudget Concentrated(double rho);
  static PrivacyBudget Approximate(double epsilon, double delta);

  const Variant& value() const { return value_; }
  bool is_pure() const { return std::holds_alternative<PureDp>(value_); }
  bool is_zcdp() const { return std::holds_alternative<Zcdp>(value_); }
  bool is_approx() const { return std::holds_alternative<ApproxDp>(value_); }

  // epsilon for PureDp/ApproxDp, rho for Zcdp.
  double primary() const;
  std::string ToString() const;

  friend bool operator==(const PrivacyBudget& a, const PrivacyBudget& b);

 private:
  explicit PrivacyBudget(Variant v) : value_(v) {}
  Variant value_;
};

// Coordinate-wise bound E|<X - mu, e_j>|^k <= gamma.
struct MomentSpec {
  double k = 2.0;
  double gamma = 1.0;

  void Validate() const;
};

// Deterministic random stream addressed by (master_seed, path). Children are a
// pure function of the parent's seed and path plus the child label, so work
// can be handed to any worker without changing the draws.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed,
                     std::vector<std::string> path = {});

  RngStream Child(std::string_view label) const;
  RngStream Child(std::uint64_t index) const;

  std::uint64_t master_seed() const { return master_seed_; }
  const std::vector<std::string>& path() const { return path_; }
  std::uint64_t derived_seed() const { return derived_seed_; }

  std::mt19937_64& engine() { return engine_; }

  // Uniform on the open interval (0, 1).
  double Uniform();
  double Normal();
  // Zero-mean Laplace with the given scale b (variance 2 b^2).
  double Laplace(double scale);

 private:
  std::uint64_t master_seed_;
  std::vector<std::string> path_;
  std::uint64_t derived_seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// Median; for even length the midpoint of the two central order statistics.
double Median(std::span<const double> values);

double Clip(double x, double lo, double hi);

struct RowRange {
  std::size_t begin;
  std::size_t end;
  std::size_t size() const { return end - begin; }
};

// m contiguous batches; the first m-1 hold floor(n/m) rows and the last one
// absorbs the remainder.
std::vector<RowRange> BatchRanges(std::size_t n, std::size_t m);
std::vector<Dataset> SplitBatches(const Dataset& dataset, std::size_t m);

}  // namespace htdp

#endif  // HTDP_CORE_H_
