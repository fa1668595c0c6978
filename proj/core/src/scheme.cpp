#include "phivar/scheme.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "phivar/error.hpp"
#include "phivar/numerics.hpp"

namespace phivar {

namespace {

std::string fmt(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

}  // namespace

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::explicit_list: return "explicit";
    case SchemeKind::geometric: return "geometric";
    case SchemeKind::takagi: return "takagi";
    case SchemeKind::faber: return "faber";
    case SchemeKind::prescribed_q: return "prescribed-q";
    case SchemeKind::prescribed_q0: return "prescribed-q0";
  }
  return "unknown";
}

CoefficientScheme CoefficientScheme::takagi(std::size_t max_level) {
  require(max_level >= 1, "scheme: max level must be >= 1");
  return CoefficientScheme(SchemeKind::takagi, max_level);
}

CoefficientScheme CoefficientScheme::geometric(double a, std::size_t max_level) {
  require(std::isfinite(a) && std::fabs(a) < 1.0, "geometric: |a| must be < 1");
  require(max_level >= 1, "scheme: max level must be >= 1");
  CoefficientScheme s(SchemeKind::geometric, max_level);
  s.a_ = a;
  return s;
}

CoefficientScheme CoefficientScheme::explicit_list(std::vector<double> alphas) {
  require(!alphas.empty(), "explicit: coefficient list must not be empty");
  for (double x : alphas) require(std::isfinite(x), "explicit: coefficients must be finite");
  CoefficientScheme s(SchemeKind::explicit_list, alphas.size() - 1);
  s.explicit_ = std::move(alphas);
  return s;
}

CoefficientScheme CoefficientScheme::faber(std::size_t max_level) {
  require(max_level >= 1, "faber: max level must be >= 1");
  CoefficientScheme s(SchemeKind::faber, max_level);
  s.faber_.assign(max_level + 1, 0.0);
  std::size_t factorial = 1;
  for (int n = 1; factorial <= max_level; ++n) {
    factorial *= static_cast<std::size_t>(n);
    if (factorial > max_level) break;
    s.faber_[factorial] = std::pow(10.0, -n);
  }
  return s;
}

CoefficientScheme CoefficientScheme::prescribed_q(double q, RegularlyVaryingFn g,
                                                  std::size_t max_level) {
  require(std::isfinite(q) && q > 0.0 && q < 1.0, "prescribed-q: q must lie in (0, 1)");
  require(max_level >= 1, "scheme: max level must be >= 1");
  CoefficientScheme s(SchemeKind::prescribed_q, max_level);
  s.q_ = q;
  s.lambda2_ = std::expm1(2.0 * q * std::numbers::ln2);
  s.g_ = std::move(g);
  return s;
}

CoefficientScheme CoefficientScheme::prescribed_q0(RegularlyVaryingFn g, std::size_t max_level) {
  require(g.has_derivative(), "prescribed-q0: g must have a derivative");
  require(max_level >= 1, "scheme: max level must be >= 1");
  CoefficientScheme s(SchemeKind::prescribed_q0, max_level);
  s.g_ = std::move(g);
  return s;
}

namespace {

double checked_derivative(const RegularlyVaryingFn& g, std::size_t m) {
  const double d = g.derivative(static_cast<double>(m));
  if (d < 0.0) {
    throw HypothesisViolation("prescribed-q0: g'(" + std::to_string(m) + ") is negative");
  }
  return d;
}

}  // namespace

double CoefficientScheme::alpha(std::size_t m) const {
  const double mm = static_cast<double>(m);
  switch (kind_) {
    case SchemeKind::takagi:
      return std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(m, 2000)));
    case SchemeKind::geometric:
      return std::pow(a_, mm);
    case SchemeKind::explicit_list:
      return m < explicit_.size() ? explicit_[m] : 0.0;
    case SchemeKind::faber:
      return m <= max_level_ ? faber_[m] : 0.0;
    case SchemeKind::prescribed_q:
      return std::exp2(-mm * (1.0 - q_) + 0.5 * std::log2(lambda2_) +
                       0.5 * g_.log_value(mm) / std::numbers::ln2);
    case SchemeKind::prescribed_q0:
      return std::ldexp(std::sqrt(checked_derivative(g_, m)),
                        -static_cast<int>(std::min<std::size_t>(m, 2000)));
  }
  return 0.0;
}

double CoefficientScheme::beta(std::size_t m) const {
  const double mm = static_cast<double>(m);
  switch (kind_) {
    case SchemeKind::takagi:
      return 1.0;
    case SchemeKind::geometric:
      return std::pow(2.0 * a_, mm);
    case SchemeKind::explicit_list:
    case SchemeKind::faber: {
      const double al = alpha(m);
      return al == 0.0 ? 0.0 : std::ldexp(al, static_cast<int>(std::min<std::size_t>(m, 4000)));
    }
    case SchemeKind::prescribed_q:
      return std::exp2(q_ * mm + 0.5 * std::log2(lambda2_) +
                       0.5 * g_.log_value(mm) / std::numbers::ln2);
    case SchemeKind::prescribed_q0:
      return std::sqrt(checked_derivative(g_, m));
  }
  return 0.0;
}

double CoefficientScheme::log2_abs_beta(std::size_t m) const {
  const double mm = static_cast<double>(m);
  switch (kind_) {
    case SchemeKind::takagi:
      return 0.0;
    case SchemeKind::geometric:
      if (m == 0) return 0.0;
      return mm * std::log2(std::fabs(2.0 * a_));
    case SchemeKind::explicit_list:
    case SchemeKind::faber: {
      const double al = alpha(m);
      return al == 0.0 ? -INFINITY : std::log2(std::fabs(al)) + mm;
    }
    case SchemeKind::prescribed_q:
      return q_ * mm + 0.5 * std::log2(lambda2_) + 0.5 * g_.log_value(mm) / std::numbers::ln2;
    case SchemeKind::prescribed_q0:
      return 0.5 * std::log2(checked_derivative(g_, m));
  }
  return 0.0;
}

std::vector<double> CoefficientScheme::betas(std::size_t n) const {
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) out[m] = beta(m);
  return out;
}

bool CoefficientScheme::equal_abs_beta_prefix(std::size_t n) const {
  if (n <= 1 || kind_ == SchemeKind::takagi) return true;
  if (kind_ == SchemeKind::geometric) return std::fabs(a_) == 0.5;
  const double b0 = std::fabs(beta(0));
  for (std::size_t m = 1; m < n; ++m) {
    if (std::fabs(std::fabs(beta(m)) - b0) > 1e-15 * b0) return false;
  }
  return true;
}

double CoefficientScheme::s_squared(std::size_t n) const {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  switch (kind_) {
    case SchemeKind::takagi:
      return nn;
    case SchemeKind::geometric: {
      const double r = 4.0 * a_ * a_;
      if (r == 1.0) return nn;
      if (r == 0.0) return 1.0;
      return std::expm1(nn * std::log(r)) / (r - 1.0);
    }
    case SchemeKind::prescribed_q:
      if (g_.is_constant()) return g_(0.0) * std::expm1(2.0 * q_ * nn * std::numbers::ln2);
      break;
    default:
      break;
  }
  CompensatedSum sum;
  for (std::size_t m = 0; m < n; ++m) {
    const double b = beta(m);
    sum.add(b * b);
  }
  return sum.value();
}

std::vector<double> CoefficientScheme::log2_s_squared_prefix(std::size_t n_max) const {
  std::vector<double> out(n_max + 1, -INFINITY);
  double acc = -INFINITY;  // natural log of the running sum
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double lb = log2_abs_beta(n - 1);
    acc = log_add_exp(acc, 2.0 * lb * std::numbers::ln2);
    out[n] = acc / std::numbers::ln2;
  }
  return out;
}

double CoefficientScheme::prescribed_tail(std::size_t M) const {
  // Majorant gamma_m >= |alpha_m| whose forward ratio is bounded by
  // base * sqrt(g ratio) from some level K on.
  double base;
  double log_scale;  // log2 of the constant under the square root
  bool per_level = false;
  if (kind_ == SchemeKind::prescribed_q) {
    base = std::exp2(-(1.0 - q_));
    log_scale = std::log2(lambda2_);
  } else {
    const auto bound = g_.log_derivative_bound();
    if (!bound) return INFINITY;
    if (*bound == 0.0) return 0.0;
    base = 0.5;
    log_scale = std::log2(*bound);
    per_level = true;  // |g'(m)| <= S g(m) / m
  }
  const double decay = kind_ == SchemeKind::prescribed_q ? (1.0 - q_) : 1.0;
  auto gamma = [&](std::size_t m) {
    const double mm = static_cast<double>(m);
    double l2 = 0.5 * (log_scale + g_.log_value(mm) / std::numbers::ln2);
    if (per_level) l2 -= 0.5 * std::log2(std::max(mm, 1.0));
    return std::exp2(-mm * decay + l2);
  };

  const double anchor = g_.ratio_anchor();
  if (!std::isfinite(anchor)) return INFINITY;
  std::size_t K = std::max<std::size_t>(M + 1, static_cast<std::size_t>(std::ceil(anchor)));
  CompensatedSum sum;
  for (std::size_t m = M + 1; m < K; ++m) sum.add(gamma(m));
  for (std::size_t guard = 0; guard < 1000000; ++guard, ++K) {
    const double r = base * std::sqrt(g_.forward_ratio_bound(static_cast<double>(K)));
    if (r < 1.0 - 1e-9) {
      sum.add(gamma(K) / (1.0 - r));
      return 0.5 * sum.value();
    }
    sum.add(gamma(K));
  }
  return INFINITY;
}

double CoefficientScheme::tail_bound(std::size_t M) const {
  switch (kind_) {
    case SchemeKind::takagi:
      return std::ldexp(0.5, -static_cast<int>(std::min<std::size_t>(M, 2000)));
    case SchemeKind::geometric: {
      const double aa = std::fabs(a_);
      return 0.5 * std::pow(aa, static_cast<double>(M + 1)) / (1.0 - aa);
    }
    case SchemeKind::explicit_list: {
      CompensatedSum s;
      for (std::size_t m = M + 1; m < explicit_.size(); ++m) s.add(std::fabs(explicit_[m]));
      return 0.5 * s.value();
    }
    case SchemeKind::faber: {
      CompensatedSum s;
      for (std::size_t m = M + 1; m <= max_level_; ++m) s.add(faber_[m]);
      return 0.5 * s.value();
    }
    case SchemeKind::prescribed_q:
    case SchemeKind::prescribed_q0:
      return prescribed_tail(M);
  }
  return INFINITY;
}

std::size_t CoefficientScheme::truncation_level(double tolerance) const {
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
  for (std::size_t M = 0; M <= max_level_; ++M) {
    if (tail_bound(M) <= tolerance) return M;
  }
  throw CapExceeded("tolerance " + fmt(tolerance) + " unreachable within max level " +
                    std::to_string(max_level_) + " for scheme " + description());
}

std::optional<std::size_t> CoefficientScheme::last_nonzero_level() const {
  const std::vector<double>* table = nullptr;
  if (kind_ == SchemeKind::explicit_list) table = &explicit_;
  if (kind_ == SchemeKind::faber) table = &faber_;
  if (!table) return std::nullopt;
  for (std::size_t m = table->size(); m-- > 0;) {
    if ((*table)[m] != 0.0) return m;
  }
  return 0;
}

std::optional<AsymptoticProfile> CoefficientScheme::profile() const {
  switch (kind_) {
    case SchemeKind::takagi:
      return AsymptoticProfile{0.0, INFINITY, false};
    case SchemeKind::geometric: {
      const double r = 4.0 * a_ * a_;
      if (r > 1.0) return AsymptoticProfile{0.5 * std::log2(r), 1.0 / (r - 1.0), false};
      if (r == 1.0) return AsymptoticProfile{0.0, INFINITY, false};
      return AsymptoticProfile{0.0, 1.0 / (1.0 - r), true};
    }
    case SchemeKind::explicit_list:
      return AsymptoticProfile{0.0, s_squared(explicit_.size()), true};
    case SchemeKind::faber:
      return std::nullopt;
    case SchemeKind::prescribed_q:
      return AsymptoticProfile{q_, g_.limit_at_infinity(), false};
    case SchemeKind::prescribed_q0: {
      const auto c = g_.limit_at_infinity();
      return AsymptoticProfile{0.0, c, c && std::isfinite(*c)};
    }
  }
  return std::nullopt;
}

std::string CoefficientScheme::description() const {
  switch (kind_) {
    case SchemeKind::takagi:
      return "takagi";
    case SchemeKind::geometric:
      return "geometric:a=" + fmt(a_);
    case SchemeKind::explicit_list: {
      std::string s = "explicit:";
      for (std::size_t i = 0; i < explicit_.size(); ++i) {
        if (i) s += ",";
        s += fmt(explicit_[i]);
      }
      return s;
    }
    case SchemeKind::faber:
      return "faber:max=" + std::to_string(max_level_);
    case SchemeKind::prescribed_q:
      return "prescribed-q:q=" + fmt(q_) + ",g=" + g_.expression();
    case SchemeKind::prescribed_q0:
      return "prescribed-q0:g=" + g_.expression();
  }
  return "unknown";
}

}  // namespace phivar
