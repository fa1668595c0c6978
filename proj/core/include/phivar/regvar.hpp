#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phivar {

// A strictly positive function on [0, inf) that is regularly varying at
// infinity. Built-in forms are C, x^rho, (1+x)^rho, log(e+x)^kappa, a
// log-log interpolated table, the integrated slowly varying function
// produced by build_ell(), and finite products of these.
//
// Instances are immutable and cheap to copy; concurrent reads are safe.
class RegularlyVaryingFn {
 public:
  // g == 1.
  RegularlyVaryingFn();

  static RegularlyVaryingFn constant(double c);
  // x^rho, evaluated as max(x, clamp)^rho so that it stays bounded near 0.
  static RegularlyVaryingFn power(double rho, double clamp = 1.0);
  static RegularlyVaryingFn shifted_power(double rho);
  static RegularlyVaryingFn log_power(double kappa);
  // Knots (x_i, y_i) with 0 < x_0 < x_1 < ... and y_i > 0. Interpolates
  // log y linearly in log x, is constant below x_0 and extends the last
  // segment as a power law, whose exponent is the index.
  static RegularlyVaryingFn tabulated(std::vector<double> xs, std::vector<double> ys);

  RegularlyVaryingFn operator*(const RegularlyVaryingFn& other) const;

  // g(x). Throws InvalidArgument for negative or non-finite x.
  double operator()(double x) const;
  // log g(x) for x >= 0, never forming g itself.
  double log_value(double x) const;
  // log g(e^u); stays finite for arguments far beyond the double range.
  double log_value_at_exp(double u) const;

  // Regular-variation index: sum of the factor indices.
  double index() const noexcept;

  bool has_derivative() const noexcept;
  // g'(x). Throws InvalidArgument when no derivative is available.
  double derivative(double x) const;

  bool is_constant() const noexcept;
  // lim g(x) as x -> inf; +inf when divergent, nullopt when the form does
  // not determine it (quadrature-backed integrated forms, mixed products of
  // index 0).
  std::optional<double> limit_at_infinity() const;

  // Upper bound on sup_{y >= x} g(y + 1) / g(y), valid for x >= ratio_anchor().
  double forward_ratio_bound(double x) const;
  // Smallest x for which forward_ratio_bound() is valid (+inf if never).
  double ratio_anchor() const noexcept;

  // Bound K with |g'(x)| <= K g(x) / x for x >= 1; nullopt if unknown.
  std::optional<double> log_derivative_bound() const;

  // Expression in the config grammar (const:, pow:, spow:, logpow:, table(),
  // ell(), mul()).
  std::string expression() const;

  struct Factor;

 private:
  explicit RegularlyVaryingFn(std::vector<std::shared_ptr<const Factor>> factors);

  std::vector<std::shared_ptr<const Factor>> factors_;

  friend RegularlyVaryingFn build_ell(const RegularlyVaryingFn& L, double b);
};

// ell(x) = (1/log b) * int_1^x L(t)/t dt = int_0^{log_b x} L(b^s) ds for
// x >= b, and ell(b) below, so that ell stays strictly positive. Closed form
// when L is constant or a constant multiple of log(e+x); adaptive
// Gauss-Kronrod quadrature with relative tolerance 1e-10 otherwise.
// L must be slowly varying (index 0) and b > 1.
RegularlyVaryingFn build_ell(const RegularlyVaryingFn& L, double b);

// The gauge Phi_q(x) = x^{1/(1-q)} g(-log2(x)/(1-q))^{-1/(2(1-q))} on
// [0, 1), extended by Phi_q(0) = 0.
class PhiFunction {
 public:
  PhiFunction(double q, RegularlyVaryingFn g);

  double q() const noexcept { return q_; }
  const RegularlyVaryingFn& g() const noexcept { return g_; }
  // 1/(1-q).
  double exponent() const noexcept { return exponent_; }

  // Throws InvalidArgument outside [0, 1).
  double operator()(double x) const;
  // Unchecked evaluation for x in (0, 1).
  double eval_unchecked(double x) const noexcept;
  // log Phi_q(e^v) for v < 0; usable where e^v underflows.
  double log_eval_at_log(double v) const;

 private:
  double q_;
  RegularlyVaryingFn g_;
  double exponent_;
  bool constant_g_;
  double constant_factor_ = 1.0;
};

}  // namespace phivar
