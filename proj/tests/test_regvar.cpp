#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "phivar/error.hpp"
#include "phivar/regvar.hpp"

using namespace phivar;
using RV = RegularlyVaryingFn;

TEST_CASE("eval_g examples") {
  CHECK(RV::constant(1.0)(5.0) == 1.0);
  CHECK(RV::power(1.0)(4.0) == 4.0);
  CHECK(RV::shifted_power(2.0)(3.0) == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(RV::log_power(1.0)(0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(RV::power(1.0)(-1.0), InvalidArgument);
  CHECK_THROWS_AS(RV::power(1.0)(NAN), InvalidArgument);
  CHECK_THROWS_AS(RV::power(1.0)(INFINITY), InvalidArgument);
}

TEST_CASE("power form is clamped below one") {
  CHECK(RV::power(2.0)(0.25) == 1.0);
  CHECK(RV::power(-1.0)(0.0) == 1.0);
  CHECK(RV::power(2.0, 3.0)(1.0) == 9.0);
  CHECK(RV::power(2.0, 3.0)(4.0) == 16.0);
}

TEST_CASE("strict positivity") {
  const std::vector<RV> forms{RV::constant(0.3), RV::power(-2.0), RV::shifted_power(-2.0),
                              RV::log_power(-1.5), RV::power(0.5) * RV::log_power(2.0),
                              RV::tabulated({1, 10, 100}, {1, 5, 2})};
  for (const auto& g : forms) {
    for (double x : {0.0, 0.5, 1.0, 7.0, 1e3, 1e12, 1e100}) CHECK(g(x) > 0.0);
  }
}

TEST_CASE("regular variation ratio at large x") {
  const std::vector<RV> forms{RV::power(1.0), RV::power(-0.5), RV::shifted_power(2.0),
                              RV::shifted_power(-2.0), RV::log_power(3.0),
                              RV::constant(2.0) * RV::power(0.7) * RV::log_power(-1.0)};
  for (const auto& g : forms) {
    for (double lambda : {2.0, 10.0}) {
      // Log factors converge slowly, so go far out.
      const double x = 1e300;
      const double expected = std::pow(lambda, g.index());
      CHECK(std::fabs(std::exp(g.log_value(lambda * x) - g.log_value(x)) / expected - 1.0) <= 0.02);
    }
  }
}

TEST_CASE("derivative matches a central difference") {
  const std::vector<RV> forms{RV::power(1.0), RV::power(2.5), RV::shifted_power(-2.0),
                              RV::log_power(2.0), RV::power(0.5) * RV::log_power(1.0),
                              RV::constant(3.0)};
  for (const auto& g : forms) {
    REQUIRE(g.has_derivative());
    for (double x : {1.5, 10.0, 1e3, 1e6}) {
      const double h = 1e-5 * x;
      const double fd = (g(x + h) - g(x - h)) / (2 * h);
      const double d = g.derivative(x);
      if (d == 0.0) {
        CHECK(fd == 0.0);
      } else {
        CHECK(std::fabs(fd / d - 1.0) <= 1e-8);
      }
    }
  }
}

TEST_CASE("monotone on a grid for nonzero index") {
  for (const auto& g : {RV::power(1.5), RV::shifted_power(-1.0), RV::power(0.3) * RV::log_power(1.0)}) {
    double prev = g(10.0);
    for (double x = 11; x < 1e6; x *= 1.1) {
      const double v = g(x);
      if (g.index() > 0) {
        CHECK(v > prev);
      } else {
        CHECK(v < prev);
      }
      prev = v;
    }
  }
}

TEST_CASE("log evaluation agrees with direct evaluation") {
  const auto g = RV::constant(2.0) * RV::shifted_power(-2.0) * RV::log_power(1.5);
  for (double x : {0.0, 1.0, 3.0, 1e5}) CHECK(g.log_value(x) == doctest::Approx(std::log(g(x))));
  for (double u : {0.0, 2.0, 30.0}) {
    CHECK(g.log_value_at_exp(u) == doctest::Approx(std::log(g(std::exp(u)))).epsilon(1e-12));
  }
  // Far beyond the double range.
  const double big = g.log_value_at_exp(1e6);
  CHECK(std::isfinite(big));
  CHECK(big == doctest::Approx(std::log(2.0) - 2e6 + 1.5 * std::log(1e6)).epsilon(1e-9));
}

TEST_CASE("tabulated form interpolates log-log and extends as a power law") {
  const auto g = RV::tabulated({1, 10, 100}, {2, 20, 40});
  CHECK(g(0.5) == doctest::Approx(2.0));
  CHECK(g(10) == doctest::Approx(20.0));
  CHECK(g(std::sqrt(10.0)) == doctest::Approx(std::sqrt(40.0)));
  CHECK(g.index() == doctest::Approx(std::log10(2.0)));
  CHECK(g(1000) == doctest::Approx(80.0));
  CHECK_THROWS_AS(RV::tabulated({1, 1}, {1, 2}), InvalidArgument);
  CHECK_THROWS_AS(RV::tabulated({1, 2}, {1, -2}), InvalidArgument);
}

TEST_CASE("limits at infinity") {
  CHECK(*RV::constant(3.0).limit_at_infinity() == 3.0);
  CHECK(std::isinf(*RV::power(1.0).limit_at_infinity()));
  CHECK(*RV::shifted_power(-1.0).limit_at_infinity() == 0.0);
  CHECK(std::isinf(*(RV::constant(2.0) * RV::log_power(1.0)).limit_at_infinity()));
}

TEST_CASE("Phi_q examples") {
  const PhiFunction phi0(0.0, RV::power(1.0));
  CHECK(phi0(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(phi0(0.25) == doctest::Approx(0.25 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(phi0(0.0) == 0.0);
  const PhiFunction half(0.5, RV::constant(1.0));
  CHECK(half(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(half.exponent() == 2.0);
  CHECK_THROWS_AS(phi0(1.0), InvalidArgument);
  CHECK_THROWS_AS(phi0(-0.1), InvalidArgument);
  CHECK_THROWS_AS(PhiFunction(1.0, RV::constant(1.0)), InvalidArgument);
}

TEST_CASE("Phi_q with constant g is an exact power") {
  for (double q : {0.0, 0.3, 0.7}) {
    for (double c : {0.5, 1.0, 4.0}) {
      const PhiFunction phi(q, RV::constant(c));
      const double p = 1.0 / (1.0 - q);
      for (double x : {1e-9, 0.01, 0.3, 0.99}) {
        CHECK(phi(x) == doctest::Approx(std::pow(x, p) * std::pow(c, -0.5 * p)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("Phi_q is positive and vanishes at zero") {
  const PhiFunction phi(0.7, RV::shifted_power(2.0));
  double prev = INFINITY;
  for (int k = 1; k <= 60; ++k) {
    const double v = phi(std::ldexp(1.0, -k));
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-20);
  CHECK(phi(1.0 - 1e-16) > 0.0);
  for (double x : {1e-3, 0.2, 0.9}) {
    CHECK(phi.log_eval_at_log(std::log(x)) == doctest::Approx(std::log(phi(x))).epsilon(1e-12));
  }
  CHECK(std::isfinite(phi.log_eval_at_log(-1e5)));
}

TEST_CASE("build_ell closed forms and quadrature") {
  const auto ell1 = build_ell(RV::constant(1.0), 2.0);
  CHECK(ell1(32.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(ell1(2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ell1(1.0) == doctest::Approx(1.0));  // clamped at b

  // ell(2^10) = int_0^10 log(e + 2^s) ds, Simpson oracle.
  const auto lp = build_ell(RV::log_power(1.0), 2.0);
  const double ref = static_cast<double>(oracle::simpson(
      [](long double s) { return std::log(std::exp(1.0L) + std::exp2(s)); }, 0.0L, 10.0L, 20000));
  CHECK(std::fabs(lp(1024.0) - ref) <= 1e-8);

  // Tabulated L goes through quadrature.
  const auto L = RV::tabulated({1, 4, 16}, {1, 2, 2});
  const auto lt = build_ell(L, 2.0);
  const double ref2 = static_cast<double>(oracle::simpson(
      [&](long double s) { return static_cast<long double>(L(std::exp2(static_cast<double>(s)))); },
      0.0L, 2.0L, 20000)) + 2.0 * (6.0 - 2.0);
  CHECK(lt(64.0) == doctest::Approx(ref2).epsilon(1e-8));

  CHECK_THROWS_AS(build_ell(RV::constant(1.0), 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_ell(RV::power(1.0), 2.0), InvalidArgument);
}

TEST_CASE("build_ell output is slowly varying") {
  const auto ell = build_ell(RV::log_power(1.0), 3.0);
  const double x = 1e15;
  CHECK(std::fabs(ell(3 * x) / ell(x) - 1.0) < 0.1);
  CHECK(std::fabs(ell(3 * 1e300) / ell(1e300) - 1.0) < 0.01);
}

TEST_CASE("expressions describe the function") {
  CHECK(RV::power(1.0).expression() == "pow:1");
  CHECK(RV::shifted_power(2.0).expression() == "spow:2");
  CHECK(RV::constant(0.5).expression() == "const:0.5");
  CHECK(RV::power(2.0, 3.0).expression() == "pow:2@3");
  CHECK((RV::constant(2.0) * RV::log_power(1.0)).expression() == "mul(const:2,logpow:1)");
}
