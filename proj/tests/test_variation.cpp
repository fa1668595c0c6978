#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "phivar/dyadic.hpp"
#include "phivar/error.hpp"
#include "phivar/variation.hpp"

using namespace phivar;
using RV = RegularlyVaryingFn;

namespace {

const SignField kClassic = SignField::classic();

// Direct sum of Phi over the oracle increments, first K + 1 cells.
double oracle_variation(const CoefficientScheme& s, const SignField& f, const Gauge& g,
                        std::size_t n, std::uint64_t K) {
  std::vector<oracle::Real> a(n);
  for (std::size_t m = 0; m < n; ++m) a[m] = s.alpha(m);
  const auto inc = oracle::increments(a, [&](std::size_t m, std::uint64_t k) { return f.sign(m, k); }, n);
  oracle::Real sum = 0;
  for (std::uint64_t k = 0; k <= K; ++k) {
    const double x = std::fabs(static_cast<double>(inc[k]));
    if (const auto* p = std::get_if<PowerGauge>(&g)) {
      sum += std::pow(static_cast<oracle::Real>(x), static_cast<oracle::Real>(p->p));
    } else if (x > 0) {
      sum += std::get<PhiFunction>(g)(x);
    }
  }
  return static_cast<double>(sum);
}

Gauge phi0() { return PhiFunction(0.0, RV::power(1.0)); }

}  // namespace

TEST_CASE("variation_enumerate examples") {
  const auto tk = CoefficientScheme::takagi();
  CHECK(variation_enumerate(tk, kClassic, PowerGauge{1}, 2, 1.0).value == 1.0);
  CHECK(variation_enumerate(tk, kClassic, PowerGauge{2}, 2, 1.0).value == 0.5);
  const auto zero = variation_enumerate(tk, kClassic, phi0(), 10, 0.0);
  CHECK(zero.value == 0.0);
  CHECK(zero.terms == 0);
  const auto g = CoefficientScheme::geometric(1 / std::sqrt(2.0));
  CHECK(variation_enumerate(g, kClassic, PowerGauge{2}, 20, 1.0).value ==
        doctest::Approx(1.0 - std::ldexp(1.0, -20)).epsilon(1e-13));
}

TEST_CASE("enumerate matches the oracle sum for partial t and all sign kinds") {
  const auto s = CoefficientScheme::prescribed_q(0.7, RV::constant(1.0));
  const std::vector<Gauge> gauges{PowerGauge{1}, PowerGauge{10.0 / 3.0},
                                  PhiFunction(0.7, RV::shifted_power(2.0))};
  for (const auto& f : {kClassic, SignField::random(3), SignField::named_rule("thue-morse")}) {
    for (const auto& g : gauges) {
      for (double t : {0.3, 0.5, 1.0}) {
        const std::size_t n = 10;
        const auto K = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(t * 1024)), 1023);
        const double v = variation_enumerate(s, f, g, n, t).value;
        CHECK(v == doctest::Approx(oracle_variation(s, f, g, n, K)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("partial sums follow the floor(t 2^n) convention") {
  const auto tk = CoefficientScheme::takagi();
  const auto a = variation_enumerate(tk, kClassic, PowerGauge{1}, 3, 0.25);
  CHECK(a.terms == 3);  // k = 0, 1, 2
  CHECK(variation_enumerate(tk, kClassic, PowerGauge{1}, 3, 1e-9).terms == 1);
  CHECK(variation_enumerate(tk, kClassic, PowerGauge{1}, 3, 1.0).terms == 8);
}

TEST_CASE("monotone in t and additive") {
  const auto s = CoefficientScheme::geometric(0.6);
  const Gauge g = PowerGauge{1.5};
  double prev = 0;
  for (double t = 0; t <= 1.0; t += 1.0 / 64) {
    const double v = variation_enumerate(s, kClassic, g, 8, t).value;
    CHECK(v >= prev);
    prev = v;
  }
  // V_{n,1} = V_{n,t} + rest.
  const auto inc = increments(s, kClassic, 8);
  long double rest = 0;
  for (std::size_t k = 129; k < 256; ++k) rest += std::pow(std::fabs((long double)inc[k]), 1.5L);
  const double head = variation_enumerate(s, kClassic, g, 8, 0.5).value;
  CHECK(head + double(rest) == doctest::Approx(variation_enumerate(s, kClassic, g, 8, 1.0).value).epsilon(1e-14));
}

TEST_CASE("results do not depend on the thread count") {
  const auto s = CoefficientScheme::prescribed_q(0.7, RV::constant(1.0));
  const Gauge g = PhiFunction(0.7, RV::shifted_power(2.0));
  const auto one = variation_enumerate(s, SignField::random(1), g, 16, 0.8, 1);
  const auto three = variation_enumerate(s, SignField::random(1), g, 16, 0.8, 3);
  CHECK(one.value == three.value);
  const auto m1 = variation_mc(s, kClassic, g, 16, 1.0, 5000, 9, 1);
  const auto m3 = variation_mc(s, kClassic, g, 16, 1.0, 5000, 9, 3);
  CHECK(m1.value == m3.value);
  CHECK(m1.stderr_ == m3.stderr_);
}

TEST_CASE("gauge domain guard") {
  const auto big = CoefficientScheme::explicit_list({3.0});
  CHECK_THROWS_AS(variation_enumerate(big, kClassic, PhiFunction(0.5, RV::constant(1.0)), 1, 1.0),
                  GaugeDomainError);
  CHECK_NOTHROW(variation_enumerate(big, kClassic, PowerGauge{2}, 1, 1.0));
  CHECK_THROWS_AS(variation_binomial(big, kClassic, PhiFunction(0.5, RV::constant(1.0)), 1),
                  GaugeDomainError);
}

TEST_CASE("argument validation") {
  const auto tk = CoefficientScheme::takagi();
  CHECK_THROWS_AS(variation_enumerate(tk, kClassic, PowerGauge{1}, 41, 1.0), CapExceeded);
  CHECK_THROWS_AS(variation_enumerate(tk, kClassic, PowerGauge{1}, 4, 1.5), InvalidArgument);
  CHECK_THROWS_AS(variation_enumerate(tk, kClassic, PowerGauge{0}, 4, 1.0), InvalidArgument);
  CHECK_THROWS_AS(variation_mc(tk, kClassic, PowerGauge{1}, 4, 1.0, 99, 0), InvalidArgument);
  CHECK_THROWS_AS(variation_binomial(tk, kClassic, PowerGauge{1}, 4, 0.5), InvalidArgument);
  CHECK_THROWS_AS(variation_binomial(tk, SignField::random(1), PowerGauge{1}, 4), HypothesisViolation);
  CHECK_THROWS_AS(variation_binomial(CoefficientScheme::geometric(0.6), kClassic, PowerGauge{1}, 4),
                  HypothesisViolation);
}

TEST_CASE("variation_binomial examples") {
  const auto tk = CoefficientScheme::takagi();
  CHECK(variation_binomial(tk, kClassic, PowerGauge{1}, 2).value == doctest::Approx(1.0).epsilon(1e-15));
  const auto e10 = variation_enumerate(tk, kClassic, phi0(), 10, 1.0).value;
  CHECK(variation_binomial(tk, kClassic, phi0(), 10).value == doctest::Approx(e10).epsilon(1e-12));
  const auto big = variation_binomial(tk, kClassic, phi0(), 10000);
  CHECK(std::fabs(big.value - std::sqrt(2 / std::numbers::pi)) < 0.01);
  const auto huge = variation_binomial(tk, kClassic, phi0(), 1000000);
  CHECK(std::isfinite(huge.value));
  CHECK(std::fabs(huge.value - std::sqrt(2 / std::numbers::pi)) < 0.01);
  // |a| = 1/2 with alternating beta signs also has an equal |beta| prefix.
  const auto alt = CoefficientScheme::geometric(-0.5);
  CHECK(variation_binomial(alt, kClassic, PowerGauge{1}, 12).value ==
        doctest::Approx(variation_enumerate(alt, kClassic, PowerGauge{1}, 12, 1.0).value).epsilon(1e-12));
}

TEST_CASE("engine agreement on takagi") {
  const auto tk = CoefficientScheme::takagi();
  for (const auto& g : {Gauge{PowerGauge{1}}, Gauge{PowerGauge{2}}, phi0()}) {
    for (std::size_t n : {4, 10, 16, 20}) {
      const double e = variation_enumerate(tk, kClassic, g, n, 1.0).value;
      const double b = variation_binomial(tk, kClassic, g, n).value;
      CHECK(std::fabs(b - e) <= 1e-12 * std::fabs(e));
    }
  }
}

TEST_CASE("mc examples") {
  const auto tk = CoefficientScheme::takagi();
  const auto zero = variation_mc(tk, kClassic, phi0(), 12, 0.0, 1000, 1);
  CHECK(zero.value == 0.0);
  CHECK(zero.stderr_ == 0.0);
  const auto a = variation_mc(tk, kClassic, phi0(), 12, 1.0, 1000, 77);
  const auto b = variation_mc(tk, kClassic, phi0(), 12, 1.0, 1000, 77);
  CHECK(a.value == b.value);
  CHECK(a.stderr_ > 0.0);
}

TEST_CASE("mc is unbiased over independent seeds") {
  const auto s = CoefficientScheme::geometric(0.6);
  const Gauge g = PowerGauge{1.5};
  const double exact = variation_enumerate(s, kClassic, g, 12, 0.7).value;
  double mean = 0, var = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = variation_mc(s, kClassic, g, 12, 0.7, 2000, seed);
    mean += r.value / 20;
    var += r.stderr_ * r.stderr_ / 400;
  }
  CHECK(std::fabs(mean - exact) <= 3 * std::sqrt(var));
}

TEST_CASE("Khintchine sandwich for built-in schemes") {
  const std::vector<CoefficientScheme> schemes{
      CoefficientScheme::takagi(), CoefficientScheme::geometric(1 / std::sqrt(2.0)),
      CoefficientScheme::geometric(0.3), CoefficientScheme::explicit_list({1, 0.25, -0.5}),
      CoefficientScheme::faber(), CoefficientScheme::prescribed_q(0.7, RV::shifted_power(2.0)),
      CoefficientScheme::prescribed_q0(RV::power(2.0))};
  for (const auto& s : schemes) {
    for (double p : {1.0, 2.0, 10.0 / 3.0}) {
      const auto c = classify_power_variation(s, p, 8, 20);
      CHECK(c.khintchine_spread < 3.0);
      for (double k : c.khintchine) {
        CHECK(k > 0.0);
      }
    }
  }
}

TEST_CASE("classification examples") {
  const auto tk = classify_power_variation(CoefficientScheme::takagi(), 2, 8, 24);
  CHECK(tk.trend == Trend::vanishing);
  CHECK(tk.mode == Mode::binomial);
  for (std::size_t i = 0; i < tk.n.size(); ++i) {
    CHECK(tk.values[i] == doctest::Approx(std::ldexp(double(tk.n[i]), -int(tk.n[i]))).epsilon(1e-12));
  }
  const auto g = CoefficientScheme::geometric(1 / std::sqrt(2.0));
  CHECK(classify_power_variation(g, 1, 8, 20).trend == Trend::diverging);
  const auto st = classify_power_variation(g, 2, 8, 20);
  CHECK(st.trend == Trend::stable);
  CHECK(st.values.back() == doctest::Approx(1 - std::ldexp(1.0, -20)).epsilon(1e-12));
}

TEST_CASE("theoretical limits") {
  const auto tk = CoefficientScheme::takagi();
  CHECK(theoretical_limit(tk, phi0(), 1.0)->value == doctest::Approx(std::sqrt(2 / std::numbers::pi)));
  CHECK(theoretical_limit(tk, phi0(), 0.5)->value == doctest::Approx(0.5 * std::sqrt(2 / std::numbers::pi)));
  CHECK(!theoretical_limit(tk, PhiFunction(0.0, RV::power(2.0)), 1.0));
  CHECK(theoretical_limit(tk, PowerGauge{2}, 1.0)->value == 0.0);
  CHECK(!theoretical_limit(tk, PowerGauge{1}, 1.0));

  const auto pq = CoefficientScheme::prescribed_q(0.5, RV::constant(1.0));
  CHECK(theoretical_limit(pq, PowerGauge{2}, 1.0)->value == 1.0);
  CHECK(theoretical_limit(pq, PhiFunction(0.5, RV::constant(1.0)), 0.5)->value == 0.5);
  CHECK(!theoretical_limit(pq, PowerGauge{1.5}, 1.0));

  const auto pq2 = CoefficientScheme::prescribed_q(0.5, RV::constant(4.0));
  CHECK(theoretical_limit(pq2, PowerGauge{2}, 1.0)->value == doctest::Approx(4.0));

  CHECK(theoretical_limit(CoefficientScheme::explicit_list({1, 0.25}), PowerGauge{1}, 1.0)->value ==
        doctest::Approx(1.0));
  CHECK(!theoretical_limit(CoefficientScheme::faber(), PowerGauge{1}, 1.0));
}

TEST_CASE("convergence study examples") {
  const auto tk = CoefficientScheme::takagi();
  std::vector<std::size_t> ns;
  for (int e = 4; e <= 14; ++e) ns.push_back(std::size_t{1} << e);
  const auto st = convergence_study(tk, kClassic, phi0(), ns, 1.0, ModeSpec{Mode::binomial});
  REQUIRE(st.limit);
  for (std::size_t i = ns.size() - 5; i + 1 < ns.size(); ++i) {
    CHECK(std::fabs(*st.deviations[i + 1]) < std::fabs(*st.deviations[i]));
  }

  const auto pq = CoefficientScheme::prescribed_q(0.5, RV::constant(1.0));
  std::vector<std::size_t> small;
  for (std::size_t n = 4; n <= 20; ++n) small.push_back(n);
  const auto q2 = convergence_study(pq, kClassic, PowerGauge{2}, small, 1.0, ModeSpec{});
  CHECK(q2.limit->value == 1.0);
  for (const auto& r : q2.reports) {
    CHECK(r.value == doctest::Approx(1 - std::ldexp(1.0, -int(r.n))).epsilon(1e-12));
  }

  const auto half = convergence_study(pq, kClassic, PhiFunction(0.5, RV::constant(1.0)), {20}, 0.5, ModeSpec{});
  CHECK(half.reports[0].value == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(half.limit->value == 0.5);
}
