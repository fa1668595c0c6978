#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phivar/scheme.hpp"
#include "phivar/sign_field.hpp"

namespace phivar {

inline constexpr std::size_t kEnumerationCap = 40;
inline constexpr std::size_t kIncrementCap = 62;
inline constexpr std::size_t kPathCap = 26;

// Distance from t to the nearest integer.
double tent(double t) noexcept;

// Index k in [1, 2^m] of the level-m cell containing t in [0, 1], modulo 2^64
// for m >= 64; t = 1 belongs to the last cell.
std::uint64_t cell_index(std::size_t m, double t) noexcept;

// Truncated evaluation of t -> sum_m alpha_m sigma_m(t) phi(2^m t). The
// truncation level is the smallest M with tail_bound(M) <= tolerance, fixed
// at construction so repeated evaluations share one coefficient table.
class SeriesEvaluator {
 public:
  SeriesEvaluator(const CoefficientScheme& scheme, SignField signs, double tolerance);

  std::size_t truncation_level() const noexcept { return level_; }
  double tolerance() const noexcept { return tolerance_; }
  // Throws InvalidArgument for t outside [0, 1].
  double operator()(double t) const;

 private:
  SignField signs_;
  double tolerance_;
  std::size_t level_;
  std::vector<double> alphas_;
};

double eval_f(const CoefficientScheme& scheme, const SignField& signs, double t,
              double tolerance);

// Walks the level-n increments in index order. The state is a stack of left
// partial sums P[m] = sum_{j<m} beta_j sigma_j eps_j(k); moving to k + 1 only
// rebuilds the levels whose slope sign or cell changed (the trailing run of
// ones of k), so each step costs O(1) amortized and yields exactly the value
// of the direct left fold.
class IncrementWalker {
 public:
  IncrementWalker(const std::vector<double>& betas, const SignField& signs);

  std::size_t level() const noexcept { return n_; }
  std::uint64_t index() const noexcept { return k_; }

  // Positions the walker at k in [0, 2^n) in O(n).
  void seek(std::uint64_t k);

  // Increment at the current index.
  double value() const noexcept { return prefix_[n_] * scale_; }

  // Moves to index + 1; must not be called at the last index.
  void advance() {
    const auto t = static_cast<std::size_t>(std::countr_one(k_));
    ++k_;
    for (std::size_t m = n_ - 1 - t; m < n_; ++m) prefix_[m + 1] = prefix_[m] + term(m, k_);
  }

 private:
  double term(std::size_t m, std::uint64_t k) const {
    const double b = ((k >> (n_ - m - 1)) & 1U) ? -betas_[m] : betas_[m];
    if (classic_) return b;
    return signs_.sign(m, (k >> (n_ - m)) + 1) < 0 ? -b : b;
  }

  std::size_t n_;
  std::uint64_t k_ = 0;
  double scale_;
  bool classic_;
  SignField signs_;
  std::vector<double> betas_;
  std::vector<double> prefix_;
};

// Delta_{n,k} = X((k+1) 2^{-n}) - X(k 2^{-n}), computed from the bits of k:
// 2^{-n} sum_{m<n} beta_m sigma_m eps_m(k), eps_m(k) = +1 iff bit n-m-1 of
// k is clear. Exact: levels m >= n do not move level-n dyadic increments.
double increment(const CoefficientScheme& scheme, const SignField& signs, std::size_t n,
                 std::uint64_t k);

// All 2^n increments of level n (n <= kPathCap).
std::vector<double> increments(const CoefficientScheme& scheme, const SignField& signs,
                               std::size_t n);

struct EnumerationSummary {
  std::uint64_t count = 0;
  double telescoped_sum = 0.0;
  double max_abs = 0.0;
};

// Visits every level-n increment in index order. Exceptions thrown by the
// visitor propagate.
EnumerationSummary enumerate_increments(
    const CoefficientScheme& scheme, const SignField& signs, std::size_t n,
    const std::function<void(std::uint64_t, double)>& visitor = {});

struct DyadicPath {
  std::size_t level = 0;
  std::vector<double> values;  // X(k 2^{-level}), k = 0..2^level
  std::string scheme_id;
  std::string signs_id;
  std::optional<std::uint64_t> seed;
};

// Path on the level-N grid from cumulative increments. Levels m >= N vanish
// at grid points, so no truncation error enters; `tolerance` is validated
// for interface symmetry with eval_f. Throws CapExceeded for N > kPathCap.
DyadicPath gen_path(const CoefficientScheme& scheme, const SignField& signs, std::size_t N,
                    double tolerance = 1e-12);

}  // namespace phivar
