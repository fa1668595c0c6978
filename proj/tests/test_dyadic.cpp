#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "phivar/dyadic.hpp"
#include "phivar/error.hpp"
#include "phivar/path_io.hpp"

using namespace phivar;
using RV = RegularlyVaryingFn;

namespace {

std::vector<oracle::Real> alphas_of(const CoefficientScheme& s, std::size_t count) {
  std::vector<oracle::Real> a(count);
  for (std::size_t m = 0; m < count; ++m) a[m] = s.alpha(m);
  return a;
}

oracle::SignFn signs_of(const SignField& f) {
  return [f](std::size_t m, std::uint64_t k) { return f.sign(m, k); };
}

}  // namespace

TEST_CASE("tent examples") {
  CHECK(tent(0.0) == 0.0);
  CHECK(tent(0.3) == doctest::Approx(0.3));
  CHECK(tent(0.75) == 0.25);
  CHECK(tent(2.5) == 0.5);
  CHECK(tent(-0.2) == doctest::Approx(0.2));
}

TEST_CASE("eval_f examples") {
  const auto tk = CoefficientScheme::takagi();
  const auto c = SignField::classic();
  CHECK(eval_f(tk, c, 0.25, 1e-12) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_f(tk, c, 0.5, 1e-12) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_f(tk, c, 0.0, 1e-12) == 0.0);
  CHECK(eval_f(CoefficientScheme::faber(), SignField::random(3), 0.0, 1e-9) == 0.0);
  CHECK_THROWS_AS(eval_f(tk, c, 1.5, 1e-12), InvalidArgument);
  CHECK_THROWS_AS(eval_f(CoefficientScheme::takagi(10), c, 0.3, 1e-12), CapExceeded);
}

TEST_CASE("eval_f agrees with a long-double series at non-dyadic points") {
  const auto s = CoefficientScheme::prescribed_q(0.7, RV::shifted_power(2.0));
  const SeriesEvaluator f(s, SignField::random(9), 1e-10);
  const auto a = alphas_of(s, 400);
  const auto sign = signs_of(SignField::random(9));
  for (double t : {0.1, 1.0 / 3.0, 0.7071, 0.999}) {
    // Sum the oracle to level 400, well past the truncation level.
    CHECK(std::fabs(f(t) - static_cast<double>(oracle::series(a, sign, t))) <= 1e-10);
  }
}

TEST_CASE("cell index") {
  CHECK(cell_index(0, 0.3) == 1);
  CHECK(cell_index(2, 0.0) == 1);
  CHECK(cell_index(2, 0.25) == 2);
  CHECK(cell_index(2, 0.99) == 4);
  CHECK(cell_index(2, 1.0) == 4);
  CHECK(cell_index(70, 0.5) == 1);  // 2^69 mod 2^64 = 0
}

TEST_CASE("increment examples") {
  const auto tk = CoefficientScheme::takagi();
  const auto c = SignField::classic();
  CHECK(increment(tk, c, 2, 0) == 0.5);
  CHECK(increment(tk, c, 2, 1) == 0.0);
  CHECK(increment(tk, c, 2, 3) == -0.5);
  CHECK_THROWS_AS(increment(tk, c, 2, 4), InvalidArgument);
  CHECK_THROWS_AS(increment(tk, c, 0, 0), CapExceeded);
}

TEST_CASE("enumerate_increments examples") {
  const auto inc = increments(CoefficientScheme::takagi(), SignField::classic(), 2);
  CHECK(inc == std::vector<double>{0.5, 0.0, 0.0, -0.5});

  const auto g = CoefficientScheme::geometric(1 / std::sqrt(2.0));
  long double sq = 0;
  const auto summary = enumerate_increments(g, SignField::classic(), 10, [&](std::uint64_t, double d) {
    sq += static_cast<long double>(d) * d;
  });
  CHECK(summary.count == 1024);
  CHECK(std::fabs(summary.telescoped_sum) <= 1e-12);
  CHECK(static_cast<double>(sq) == doctest::Approx(1.0 - std::ldexp(1.0, -10)).epsilon(1e-13));
  CHECK_THROWS_AS(enumerate_increments(g, SignField::classic(), 41), CapExceeded);
}

TEST_CASE("visitor exceptions propagate") {
  CHECK_THROWS_AS(enumerate_increments(CoefficientScheme::takagi(), SignField::classic(), 5,
                                       [](std::uint64_t k, double) {
                                         if (k == 9) throw InvalidArgument("stop");
                                       }),
                  InvalidArgument);
}

TEST_CASE("walker matches direct folds and the differenced series") {
  const std::vector<CoefficientScheme> schemes{
      CoefficientScheme::takagi(), CoefficientScheme::geometric(-0.6),
      CoefficientScheme::explicit_list({1.0, 0.25, -0.5}),
      CoefficientScheme::prescribed_q(0.7, RV::shifted_power(2.0))};
  const std::vector<SignField> fields{SignField::classic(), SignField::random(42),
                                      SignField::named_rule("thue-morse"),
                                      SignField::named_rule("alternate-cell"),
                                      SignField::named_rule("alternate-level")};
  for (const auto& s : schemes) {
    for (const auto& f : fields) {
      for (std::size_t n : {1, 3, 8}) {
        const auto inc = increments(s, f, n);
        const auto ref = oracle::increments(alphas_of(s, n), signs_of(f), n);
        for (std::uint64_t k = 0; k < inc.size(); ++k) {
          CHECK(inc[k] == increment(s, f, n, k));
          CHECK(std::fabs(inc[k] - static_cast<double>(ref[k])) <= 1e-14);
        }
      }
    }
  }
}

TEST_CASE("bit-sign law matches the floor form") {
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
      for (std::size_t m = 0; m < n; ++m) {
        const bool bit_clear = ((k >> (n - m - 1)) & 1U) == 0;
        const auto cells = static_cast<std::uint64_t>(std::floor(std::ldexp(double(k), int(m) + 1 - int(n))));
        CHECK(bit_clear == (cells % 2 == 0));
      }
    }
  }
}

TEST_CASE("classic increments have the law of signed beta sums") {
  for (const auto& s : {CoefficientScheme::geometric(0.3), CoefficientScheme::explicit_list({1, -0.25, 0.125}),
                        CoefficientScheme::prescribed_q(0.5, RV::constant(1.0))}) {
    for (std::size_t n : {4, 12}) {
      auto inc = increments(s, SignField::classic(), n);
      std::sort(inc.begin(), inc.end());
      std::vector<oracle::Real> c(n);
      for (std::size_t m = 0; m < n; ++m) c[m] = std::ldexp(static_cast<oracle::Real>(s.beta(m)), -int(n));
      const auto ref = oracle::sign_sums(c);
      REQUIRE(ref.size() == inc.size());
      for (std::size_t i = 0; i < inc.size(); ++i) CHECK(std::fabs(inc[i] - double(ref[i])) <= 1e-15);
    }
  }
}

TEST_CASE("sign fields") {
  const auto a = SignField::random(7), b = SignField::random(7), c = SignField::random(8);
  int differ = 0, plus = 0;
  for (std::size_t m = 0; m < 20; ++m) {
    for (std::uint64_t k = 1; k <= 50; ++k) {
      CHECK(a.sign(m, k) == b.sign(m, k));
      CHECK(a.sign(m, k) == a.sign(m, k));
      differ += a.sign(m, k) != c.sign(m, k);
      plus += a.sign(m, k) > 0;
    }
  }
  CHECK(differ > 300);
  CHECK(plus > 400);
  CHECK(plus < 600);
  CHECK(SignField::named_rule("alternate-cell").sign(3, 1) == 1);
  CHECK(SignField::named_rule("alternate-cell").sign(3, 2) == -1);
  CHECK(SignField::named_rule("alternate-level").sign(1, 5) == -1);
  CHECK(SignField::named_rule("thue-morse").sign(4, 4) == 1);  // popcount(3) = 2
  CHECK(SignField::named_rule("thue-morse").sign(4, 5) == -1);
  CHECK_THROWS_AS(SignField::named_rule("nope"), InvalidArgument);
  CHECK(SignField::random(42).description() == "random:seed=42");
  const auto custom = SignField::rule("even-level-first-cell",
                                      [](std::size_t m, std::uint64_t k) { return m % 2 == 0 || k != 1; });
  CHECK(custom.sign(1, 1) == -1);
  CHECK(custom.sign(2, 1) == 1);
}

TEST_CASE("gen_path examples") {
  const auto p = gen_path(CoefficientScheme::takagi(), SignField::classic(), 2);
  CHECK(p.values == std::vector<double>{0, 0.5, 0.5, 0.5, 0});

  const auto s = CoefficientScheme::prescribed_q(0.7, RV::shifted_power(2.0));
  const auto r1 = gen_path(s, SignField::random(5), 16);
  const auto r2 = gen_path(s, SignField::random(5), 16);
  CHECK(r1.values == r2.values);
  CHECK(r1.seed == 5u);
  CHECK(r1.values.front() == 0.0);
  CHECK(r1.values.back() == 0.0);
  CHECK_THROWS_AS(gen_path(s, SignField::classic(), 27), CapExceeded);
}

TEST_CASE("path differences are the increments") {
  const auto s = CoefficientScheme::prescribed_q(0.7, RV::shifted_power(2.0));
  const auto f = SignField::random(11);
  const auto p = gen_path(s, f, 12);
  long double telescoped = 0;
  for (std::uint64_t k = 0; k < 4096; ++k) {
    const double d = p.values[k + 1] - p.values[k];
    CHECK(std::fabs(d - increment(s, f, 12, k)) <= 1e-13);
    telescoped += d;
  }
  CHECK(std::fabs(static_cast<double>(telescoped)) <= 1e-12);
}

TEST_CASE("gen_path agrees with eval_f on the grid") {
  for (const auto& s : {CoefficientScheme::takagi(), CoefficientScheme::geometric(0.6)}) {
    const double tol = 1e-10;
    const auto p = gen_path(s, SignField::classic(), 12, tol);
    const SeriesEvaluator f(s, SignField::classic(), tol);
    for (std::size_t k = 0; k < p.values.size(); k += 7) {
      CHECK(std::fabs(p.values[k] - f(std::ldexp(double(k), -12))) <= tol);
    }
  }
}

TEST_CASE("path io round trip") {
  const auto p = gen_path(CoefficientScheme::geometric(0.6), SignField::random(1), 6);
  std::stringstream bin;
  write_path_binary(bin, p);
  CHECK(bin.str().size() == 16 + 8 * 65);
  CHECK(bin.str().substr(0, 8) == "PHIVPATH");
  const auto back = read_path_binary(bin);
  CHECK(back.level == 6);
  CHECK(back.values == p.values);

  std::stringstream csv;
  write_path_csv(csv, p);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,value");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(comma + 1)) == p.values[rows]);
    ++rows;
  }
  CHECK(rows == 65);

  std::stringstream bad("NOTAPATH");
  CHECK_THROWS_AS(read_path_binary(bad), InvalidArgument);
}
