#include "phivar/numerics.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace phivar {

void MomentAccumulator::merge(const MomentAccumulator& o) noexcept {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double n1 = static_cast<double>(count);
  const double n2 = static_cast<double>(o.count);
  const double n = n1 + n2;
  const double delta = o.mean - mean;
  mean += delta * n2 / n;
  m2 += o.m2 + delta * delta * n1 * n2 / n;
  count += o.count;
}

double MomentAccumulator::variance() const noexcept {
  if (count < 2) return 0.0;
  return m2 / static_cast<double>(count - 1);
}

double MomentAccumulator::standard_error() const noexcept {
  if (count < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(count));
}

double log_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -INFINITY;
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
}

double log_add_exp(double a, double b) noexcept {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

namespace {

// Li2 via the Bernoulli series in u = -log(1 - x); converges for |u| < 2*pi.
// Used for x in [-1, 1/2] where |u| <= log 2.
double dilog_bernoulli(double x) {
  // B_{2k} / (2k+1)! for k = 1..
  static constexpr std::array<double, 10> kCoeff = {
      1.0 / 36.0,
      -1.0 / 3600.0,
      1.0 / 211680.0,
      -1.0 / 10886400.0,
      1.0 / 526901760.0,
      -4.0647616451442255268e-11,
      8.9216910204564525552e-13,
      -1.9939295860721075687e-14,
      4.5189800296199181917e-16,
      -1.0356517612181247014e-17,
  };
  const double u = -std::log1p(-x);
  const double u2 = u * u;
  double result = u - u2 / 4.0;
  double p = u;
  for (double c : kCoeff) {
    p *= u2;
    result += c * p;
  }
  return result;
}

}  // namespace

double dilog(double x) {
  constexpr double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
  if (x == 1.0) return pi2_6;
  if (x == 0.0) return 0.0;
  if (x < -1.0) {
    // Inversion: Li2(x) = -pi^2/6 - log(-x)^2 / 2 - Li2(1/x).
    const double l = std::log(-x);
    return -pi2_6 - 0.5 * l * l - dilog(1.0 / x);
  }
  if (x <= 0.5) return dilog_bernoulli(x);
  // Reflection: Li2(x) = pi^2/6 - log(x) log(1 - x) - Li2(1 - x).
  return pi2_6 - std::log(x) * std::log1p(-x) - dilog_bernoulli(1.0 - x);
}

}  // namespace phivar
