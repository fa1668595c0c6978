#include <cassert>
#include <cmath>
#include <numbers>

#include "phivar/numerics.hpp"

namespace phivar {

// Didonato & Morris, "Computation of the incomplete gamma function ratios"
// (ACM TOMS 12, 1986), routine ERFC1 with IND = 0, as shipped in DCDFLIB.
double erfc_rational(double x) noexcept {
  static constexpr double c = .564189583547756e0;
  static constexpr double a[5] = {.771058495001320e-04, -.133733772997339e-02,
                                  .323076579225834e-01, .479137145607681e-01,
                                  .128379167095513e+00};
  static constexpr double b[3] = {.301048631703895e-02, .538971687740286e-01,
                                  .375795757275549e+00};
  static constexpr double p[8] = {-1.36864857382717e-07, 5.64195517478974e-01,
                                  7.21175825088309e+00,  4.31622272220567e+01,
                                  1.52989285046940e+02,  3.39320816734344e+02,
                                  4.51918953711873e+02,  3.00459261020162e+02};
  static constexpr double q[8] = {1.00000000000000e+00, 1.27827273196294e+01,
                                  7.70001529352295e+01, 2.77585444743988e+02,
                                  6.38980264465631e+02, 9.31354094850610e+02,
                                  7.90950925327898e+02, 3.00459260956983e+02};
  static constexpr double r[5] = {2.10144126479064e+00, 2.62370141675169e+01,
                                  2.13688200555087e+01, 4.65807828718470e+00,
                                  2.82094791773523e-01};
  static constexpr double s[4] = {9.41537750555460e+01, 1.87114811799590e+02,
                                  9.90191814623914e+01, 1.80124575948747e+01};

  const double ax = std::fabs(x);
  if (ax <= 0.5) {
    const double t = x * x;
    const double top = (((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4] + 1.0;
    const double bot = ((b[0] * t + b[1]) * t + b[2]) * t + 1.0;
    return 0.5 + (0.5 - x * (top / bot));
  }
  if (x <= -5.6) return 2.0;
  if (x > 100.0) return 0.0;

  double scaled;  // exp(x^2) * erfc(|x|)
  if (ax <= 4.0) {
    const double top =
        ((((((p[0] * ax + p[1]) * ax + p[2]) * ax + p[3]) * ax + p[4]) * ax + p[5]) * ax + p[6]) *
            ax +
        p[7];
    const double bot =
        ((((((q[0] * ax + q[1]) * ax + q[2]) * ax + q[3]) * ax + q[4]) * ax + q[5]) * ax + q[6]) *
            ax +
        q[7];
    scaled = top / bot;
  } else {
    const double t = 1.0 / (x * x);
    const double top = (((r[0] * t + r[1]) * t + r[2]) * t + r[3]) * t + r[4];
    const double bot = (((s[0] * t + s[1]) * t + s[2]) * t + s[3]) * t + 1.0;
    scaled = (c - t * top / bot) / ax;
  }
  const double result = std::exp(-x * x) * scaled;
  return x < 0.0 ? 2.0 - result : result;
}

double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double normal_cdf(double x) noexcept { return 0.5 * erfc_rational(-x * (0.5 * std::numbers::sqrt2)); }

namespace {

// Antiderivative of the normal CDF vanishing at -infinity.
double cdf_integral(double x) noexcept { return x * normal_cdf(x) + normal_pdf(x); }

// Integral of the upper tail 1 - N over [x, infinity).
double upper_tail_integral(double x) noexcept { return normal_pdf(x) - x * normal_cdf(-x); }

// Solve N(x) = c for x in [lo, hi], where N(lo) <= c <= N(hi).
double crossing(double c, double lo, double hi) noexcept {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double f = normal_cdf(x) - c;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    const double step = f / normal_pdf(x);
    double next = x - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-15 * (1.0 + std::fabs(x))) return next;
    x = next;
  }
  return x;
}

// Integral over [a, b] of |c - N(x)|.
double segment_distance(double c, double a, double b) noexcept {
  if (b <= a) return 0.0;
  const double na = normal_cdf(a);
  const double nb = normal_cdf(b);
  const double ga = cdf_integral(a);
  const double gb = cdf_integral(b);
  if (c <= na) return (gb - ga) - c * (b - a);
  if (c >= nb) return c * (b - a) - (gb - ga);
  const double xs = crossing(c, a, b);
  const double gs = cdf_integral(xs);
  return (c * (xs - a) - (gs - ga)) + ((gb - gs) - c * (b - xs));
}

}  // namespace

double w1_to_standard_normal(std::span<const double> atoms, std::span<const double> probs) {
  assert(atoms.size() == probs.size());
  if (atoms.empty()) return INFINITY;
  CompensatedSum total;
  total.add(cdf_integral(atoms.front()));
  CompensatedSum mass;
  for (std::size_t j = 0; j + 1 < atoms.size(); ++j) {
    mass.add(probs[j]);
    total.add(segment_distance(mass.value(), atoms[j], atoms[j + 1]));
  }
  total.add(upper_tail_integral(atoms.back()));
  return total.value();
}

}  // namespace phivar
