#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "phivar/regvar.hpp"

namespace phivar {

enum class SchemeKind { explicit_list, geometric, takagi, faber, prescribed_q, prescribed_q0 };

std::string to_string(SchemeKind kind);

// Asymptotic shape s_n^2 ~ 2^{2qn} g(n) with g(n) -> c, known in closed form
// for the built-in kinds.
struct AsymptoticProfile {
  double q = 0.0;
  std::optional<double> g_limit;   // c in [0, inf]; nullopt when undetermined
  bool bounded_variation = false;  // lim s_n^2 < inf
};

// Coefficients alpha_m of f(t) = sum_m alpha_m phi(2^m t) and the derived
// beta_m = 2^m alpha_m and s_n^2 = sum_{m<n} beta_m^2.
//
// max_level() caps truncated series evaluation. For faber and explicit
// schemes the coefficients beyond it are zero by definition; for the other
// kinds alpha and beta are defined at every level.
class CoefficientScheme {
 public:
  static constexpr std::size_t kDefaultMaxLevel = 4096;
  static constexpr std::size_t kDefaultFaberLevel = 720;

  static CoefficientScheme takagi(std::size_t max_level = kDefaultMaxLevel);
  // alpha_m = a^m, |a| < 1.
  static CoefficientScheme geometric(double a, std::size_t max_level = kDefaultMaxLevel);
  static CoefficientScheme explicit_list(std::vector<double> alphas);
  // alpha_m = 10^{-n} at m = n!, zero elsewhere, zero beyond max_level.
  static CoefficientScheme faber(std::size_t max_level = kDefaultFaberLevel);
  // alpha_m = 2^{-m(1-q)} sqrt((2^{2q} - 1) g(m)), 0 < q < 1.
  static CoefficientScheme prescribed_q(double q, RegularlyVaryingFn g,
                                        std::size_t max_level = kDefaultMaxLevel);
  // alpha_m = 2^{-m} sqrt(g'(m)); g needs a derivative, nonnegative at
  // integer levels.
  static CoefficientScheme prescribed_q0(RegularlyVaryingFn g,
                                         std::size_t max_level = kDefaultMaxLevel);

  SchemeKind kind() const noexcept { return kind_; }
  std::size_t max_level() const noexcept { return max_level_; }

  double a() const noexcept { return a_; }
  double q() const noexcept { return q_; }
  const RegularlyVaryingFn& g() const noexcept { return g_; }
  const std::vector<double>& alphas() const noexcept { return explicit_; }

  double alpha(std::size_t m) const;
  double beta(std::size_t m) const;
  // log2 |beta_m|, finite far beyond the range where beta itself overflows.
  double log2_abs_beta(std::size_t m) const;
  // beta_0, ..., beta_{n-1}.
  std::vector<double> betas(std::size_t n) const;

  // |beta_0| = ... = |beta_{n-1}| (up to a relative 1e-15).
  bool equal_abs_beta_prefix(std::size_t n) const;

  // s_n^2; closed form where one exists, compensated summation otherwise.
  double s_squared(std::size_t n) const;
  // log2 s_n^2 for n = 0..n_max (entry 0 is -inf).
  std::vector<double> log2_s_squared_prefix(std::size_t n_max) const;

  // Upper bound on (1/2) sum_{m > M} |alpha_m|: the uniform error of
  // truncating f after level M (0 <= phi <= 1/2). +inf when no bound is
  // available for the scheme's g.
  double tail_bound(std::size_t M) const;

  // Smallest M <= max_level() with tail_bound(M) <= tolerance.
  // Throws CapExceeded when the tolerance is unreachable.
  std::size_t truncation_level(double tolerance) const;

  // Largest level with a nonzero coefficient, for finite schemes.
  std::optional<std::size_t> last_nonzero_level() const;

  std::optional<AsymptoticProfile> profile() const;

  // Config-style description ("takagi", "geometric:a=0.5", ...).
  std::string description() const;

 private:
  CoefficientScheme(SchemeKind kind, std::size_t max_level) : kind_(kind), max_level_(max_level) {}

  double prescribed_tail(std::size_t M) const;

  SchemeKind kind_;
  std::size_t max_level_;
  double a_ = 0.0;
  double q_ = 0.0;
  double lambda2_ = 0.0;  // 2^{2q} - 1 for prescribed_q
  RegularlyVaryingFn g_;
  std::vector<double> explicit_;
  std::vector<double> faber_;  // dense alpha table up to max_level
};

}  // namespace phivar
