#include "phivar/dyadic.hpp"

#include <cmath>

#include "phivar/error.hpp"
#include "phivar/numerics.hpp"

namespace phivar {

double tent(double t) noexcept {
  const double f = t - std::floor(t);
  return f <= 0.5 ? f : 1.0 - f;
}

std::uint64_t cell_index(std::size_t m, double t) noexcept {
  const int mm = static_cast<int>(std::min<std::size_t>(m, 2000));
  double fl = std::floor(std::ldexp(t, mm));
  if (t >= 1.0) fl = std::max(0.0, fl - 1.0);
  std::uint64_t low;
  if (fl < 18446744073709551616.0) {
    low = static_cast<std::uint64_t>(fl);
  } else {
    int e = 0;
    const double f = std::frexp(fl, &e);
    const auto mant = static_cast<std::uint64_t>(std::ldexp(f, 53));
    const int shift = e - 53;
    low = shift >= 64 ? 0 : (mant << shift);
  }
  return low + 1;
}

SeriesEvaluator::SeriesEvaluator(const CoefficientScheme& scheme, SignField signs,
                                 double tolerance)
    : signs_(std::move(signs)), tolerance_(tolerance), level_(scheme.truncation_level(tolerance)) {
  alphas_.resize(level_ + 1);
  for (std::size_t m = 0; m <= level_; ++m) alphas_[m] = scheme.alpha(m);
}

double SeriesEvaluator::operator()(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("eval_f: t must lie in [0, 1]");
  CompensatedSum sum;
  for (std::size_t m = 0; m <= level_; ++m) {
    if (alphas_[m] == 0.0) continue;
    const double phi = tent(std::ldexp(t, static_cast<int>(std::min<std::size_t>(m, 2000))));
    if (phi == 0.0) continue;
    const double term = alphas_[m] * phi;
    sum.add(signs_.is_classic() || signs_.sign(m, cell_index(m, t)) > 0 ? term : -term);
  }
  return sum.value();
}

double eval_f(const CoefficientScheme& scheme, const SignField& signs, double t,
              double tolerance) {
  return SeriesEvaluator(scheme, signs, tolerance)(t);
}

IncrementWalker::IncrementWalker(const std::vector<double>& betas, const SignField& signs)
    : n_(betas.size()),
      scale_(std::ldexp(1.0, -static_cast<int>(betas.size()))),
      classic_(signs.is_classic()),
      signs_(signs),
      betas_(betas),
      prefix_(betas.size() + 1, 0.0) {
  if (n_ == 0 || n_ > kIncrementCap) {
    throw CapExceeded("increment level must lie in [1, " + std::to_string(kIncrementCap) + "]");
  }
  seek(0);
}

void IncrementWalker::seek(std::uint64_t k) {
  if (k >> n_) throw InvalidArgument("increment index out of range");
  k_ = k;
  for (std::size_t m = 0; m < n_; ++m) prefix_[m + 1] = prefix_[m] + term(m, k);
}

double increment(const CoefficientScheme& scheme, const SignField& signs, std::size_t n,
                 std::uint64_t k) {
  if (n == 0 || n > kIncrementCap) {
    throw CapExceeded("increment level must lie in [1, " + std::to_string(kIncrementCap) + "]");
  }
  if (k >> n) throw InvalidArgument("increment index out of range");
  IncrementWalker w(scheme.betas(n), signs);
  w.seek(k);
  return w.value();
}

std::vector<double> increments(const CoefficientScheme& scheme, const SignField& signs,
                               std::size_t n) {
  if (n > kPathCap) throw CapExceeded("increments: level above " + std::to_string(kPathCap));
  std::vector<double> out;
  out.reserve(std::size_t{1} << n);
  enumerate_increments(scheme, signs, n, [&](std::uint64_t, double d) { out.push_back(d); });
  return out;
}

EnumerationSummary enumerate_increments(
    const CoefficientScheme& scheme, const SignField& signs, std::size_t n,
    const std::function<void(std::uint64_t, double)>& visitor) {
  if (n == 0 || n > kEnumerationCap) {
    throw CapExceeded("enumeration level must lie in [1, " + std::to_string(kEnumerationCap) +
                      "]");
  }
  IncrementWalker w(scheme.betas(n), signs);
  const std::uint64_t total = std::uint64_t{1} << n;
  CompensatedSum sum;
  EnumerationSummary out;
  for (std::uint64_t k = 0;; ++k) {
    const double d = w.value();
    sum.add(d);
    out.max_abs = std::max(out.max_abs, std::fabs(d));
    if (visitor) visitor(k, d);
    if (k + 1 == total) break;
    w.advance();
  }
  out.count = total;
  out.telescoped_sum = sum.value();
  return out;
}

DyadicPath gen_path(const CoefficientScheme& scheme, const SignField& signs, std::size_t N,
                    double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidArgument("gen_path: tolerance must be > 0");
  if (N == 0 || N > kPathCap) {
    throw CapExceeded("path level must lie in [1, " + std::to_string(kPathCap) + "]");
  }
  DyadicPath path;
  path.level = N;
  path.scheme_id = scheme.description();
  path.signs_id = signs.description();
  if (signs.kind() == SignKind::random) path.seed = signs.seed();
  const std::uint64_t total = std::uint64_t{1} << N;
  path.values.assign(total + 1, 0.0);
  IncrementWalker w(scheme.betas(N), signs);
  CompensatedSum running;
  for (std::uint64_t k = 0; k < total; ++k) {
    if (k) w.advance();
    running.add(w.value());
    path.values[k + 1] = running.value();
  }
  path.values[total] = 0.0;  // X(1) = 0 for every term
  return path;
}

}  // namespace phivar
