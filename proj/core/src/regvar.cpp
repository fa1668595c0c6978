#include "phivar/regvar.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
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

// log(1 + e^u) without overflow.
double log1p_exp(double u) {
  if (u > 0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

// log(e + e^u).
double log_e_plus_exp(double u) {
  if (u > 1.0) return u + std::log1p(std::exp(1.0 - u));
  return 1.0 + std::log1p(std::exp(u - 1.0));
}

}  // namespace

struct RegularlyVaryingFn::Factor {
  virtual ~Factor() = default;
  virtual double value(double x) const = 0;
  virtual double log_value(double x) const { return std::log(value(x)); }
  virtual double log_value_at_exp(double u) const = 0;
  virtual double index() const = 0;
  virtual bool has_derivative() const { return true; }
  virtual double derivative(double x) const = 0;
  virtual bool is_constant() const { return false; }
  virtual std::optional<double> limit() const = 0;
  virtual double ratio_bound(double x) const = 0;
  virtual double ratio_anchor() const { return 0.0; }
  virtual std::optional<double> log_derivative_bound() const = 0;
  virtual std::string expression() const = 0;
};

namespace {

using Factor = RegularlyVaryingFn::Factor;

struct ConstantFactor final : Factor {
  double c;
  explicit ConstantFactor(double c) : c(c) {}
  double value(double) const override { return c; }
  double log_value_at_exp(double) const override { return std::log(c); }
  double index() const override { return 0.0; }
  double derivative(double) const override { return 0.0; }
  bool is_constant() const override { return true; }
  std::optional<double> limit() const override { return c; }
  double ratio_bound(double) const override { return 1.0; }
  std::optional<double> log_derivative_bound() const override { return 0.0; }
  std::string expression() const override { return "const:" + fmt(c); }
};

struct PowerFactor final : Factor {
  double rho;
  double clamp;
  PowerFactor(double rho, double clamp) : rho(rho), clamp(clamp) {}
  double value(double x) const override { return std::pow(std::max(x, clamp), rho); }
  double log_value(double x) const override { return rho * std::log(std::max(x, clamp)); }
  double log_value_at_exp(double u) const override {
    return rho * std::max(u, std::log(clamp));
  }
  double index() const override { return rho; }
  double derivative(double x) const override {
    if (x < clamp) return 0.0;
    return rho * std::pow(x, rho - 1.0);
  }
  bool is_constant() const override { return rho == 0.0; }
  std::optional<double> limit() const override {
    if (rho == 0.0) return 1.0;
    return rho > 0 ? INFINITY : 0.0;
  }
  double ratio_bound(double x) const override {
    if (rho <= 0) return 1.0;
    const double y = std::max(x, clamp);
    return std::pow((y + 1.0) / y, rho);
  }
  std::optional<double> log_derivative_bound() const override { return std::fabs(rho); }
  std::string expression() const override {
    std::string s = "pow:" + fmt(rho);
    if (clamp != 1.0) s += "@" + fmt(clamp);
    return s;
  }
};

struct ShiftedPowerFactor final : Factor {
  double rho;
  explicit ShiftedPowerFactor(double rho) : rho(rho) {}
  double value(double x) const override { return std::pow(1.0 + x, rho); }
  double log_value(double x) const override { return rho * std::log1p(x); }
  double log_value_at_exp(double u) const override { return rho * log1p_exp(u); }
  double index() const override { return rho; }
  double derivative(double x) const override { return rho * std::pow(1.0 + x, rho - 1.0); }
  bool is_constant() const override { return rho == 0.0; }
  std::optional<double> limit() const override {
    if (rho == 0.0) return 1.0;
    return rho > 0 ? INFINITY : 0.0;
  }
  double ratio_bound(double x) const override {
    if (rho <= 0) return 1.0;
    return std::pow((x + 2.0) / (x + 1.0), rho);
  }
  std::optional<double> log_derivative_bound() const override { return std::fabs(rho); }
  std::string expression() const override { return "spow:" + fmt(rho); }
};

struct LogPowerFactor final : Factor {
  double kappa;
  explicit LogPowerFactor(double kappa) : kappa(kappa) {}
  double value(double x) const override { return std::pow(std::log(std::numbers::e + x), kappa); }
  double log_value(double x) const override {
    return kappa * std::log(std::log(std::numbers::e + x));
  }
  double log_value_at_exp(double u) const override {
    return kappa * std::log(log_e_plus_exp(u));
  }
  double index() const override { return 0.0; }
  double derivative(double x) const override {
    const double l = std::log(std::numbers::e + x);
    return kappa * std::pow(l, kappa - 1.0) / (std::numbers::e + x);
  }
  bool is_constant() const override { return kappa == 0.0; }
  std::optional<double> limit() const override {
    if (kappa == 0.0) return 1.0;
    return kappa > 0 ? INFINITY : 0.0;
  }
  double ratio_bound(double x) const override {
    if (kappa <= 0) return 1.0;
    const double e = std::numbers::e;
    return std::pow(std::log(e + x + 1.0) / std::log(e + x), kappa);
  }
  std::optional<double> log_derivative_bound() const override { return std::fabs(kappa); }
  std::string expression() const override { return "logpow:" + fmt(kappa); }
};

struct TableFactor final : Factor {
  std::vector<double> xs, ys, log_xs, log_ys;
  double tail_slope;

  TableFactor(std::vector<double> x, std::vector<double> y) : xs(std::move(x)), ys(std::move(y)) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      log_xs.push_back(std::log(xs[i]));
      log_ys.push_back(std::log(ys[i]));
    }
    const std::size_t n = xs.size();
    tail_slope = (log_ys[n - 1] - log_ys[n - 2]) / (log_xs[n - 1] - log_xs[n - 2]);
  }

  double log_at_log(double lx) const {
    if (lx <= log_xs.front()) return log_ys.front();
    if (lx >= log_xs.back()) return log_ys.back() + tail_slope * (lx - log_xs.back());
    const auto it = std::upper_bound(log_xs.begin(), log_xs.end(), lx);
    const std::size_t j = static_cast<std::size_t>(it - log_xs.begin());
    const double w = (lx - log_xs[j - 1]) / (log_xs[j] - log_xs[j - 1]);
    return log_ys[j - 1] + w * (log_ys[j] - log_ys[j - 1]);
  }

  double value(double x) const override { return std::exp(log_value(x)); }
  double log_value(double x) const override {
    if (x <= xs.front()) return log_ys.front();
    return log_at_log(std::log(x));
  }
  double log_value_at_exp(double u) const override { return log_at_log(u); }
  double index() const override { return tail_slope; }
  bool has_derivative() const override { return false; }
  double derivative(double) const override {
    throw InvalidArgument("tabulated function has no derivative");
  }
  std::optional<double> limit() const override {
    if (tail_slope > 0) return INFINITY;
    if (tail_slope < 0) return 0.0;
    return ys.back();
  }
  double ratio_bound(double x) const override {
    if (tail_slope <= 0) return 1.0;
    return std::pow((x + 1.0) / x, tail_slope);
  }
  double ratio_anchor() const override { return xs.back(); }
  std::optional<double> log_derivative_bound() const override {
    double k = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      k = std::max(k, std::fabs((log_ys[i] - log_ys[i - 1]) / (log_xs[i] - log_xs[i - 1])));
    }
    return k;
  }
  std::string expression() const override {
    std::string s = "table(";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ",";
      s += fmt(xs[i]) + ":" + fmt(ys[i]);
    }
    return s + ")";
  }
};

struct IntegratedFactor final : Factor {
  enum class Method { linear, log_linear, quadrature };

  RegularlyVaryingFn L;
  double b;
  double log_b;
  Method method;
  double scale = 1.0;  // constant multiplier for the closed forms

  IntegratedFactor(RegularlyVaryingFn l, double base, Method m, double c)
      : L(std::move(l)), b(base), log_b(std::log(base)), method(m), scale(c) {}

  // ell(b^s) = int_0^s L(b^r) dr.
  double integral_to(double s) const {
    switch (method) {
      case Method::linear:
        return scale * s;
      case Method::log_linear: {
        // (1/log b) int_1^x log(e+t)/t dt = (1/log b)(log x + Li2(-1/e) - Li2(-x/e)).
        const double u = s * log_b;
        const double li_at_one = dilog(-1.0 / std::numbers::e);
        double minus_li;  // -Li2(-e^{u-1})
        if (u > 1.0) {
          const double w = u - 1.0;
          minus_li = std::numbers::pi * std::numbers::pi / 6.0 + 0.5 * w * w +
                     dilog(-std::exp(-w));
        } else {
          minus_li = -dilog(-std::exp(u - 1.0));
        }
        return scale * (u + li_at_one + minus_li) / log_b;
      }
      case Method::quadrature: {
        auto f = [this](double r) { return std::exp(L.log_value_at_exp(r * log_b)); };
        double err = 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, s, 30, 1e-10,
                                                                              &err);
      }
    }
    return 0.0;
  }

  double value(double x) const override {
    const double s = x <= b ? 1.0 : std::log(x) / log_b;
    return integral_to(s);
  }
  double log_value_at_exp(double u) const override {
    const double s = std::max(1.0, u / log_b);
    return std::log(integral_to(s));
  }
  double index() const override { return 0.0; }
  double derivative(double x) const override {
    if (x <= b) return 0.0;
    return L(x) / (x * log_b);
  }
  std::optional<double> limit() const override {
    if (method != Method::quadrature) return INFINITY;
    return std::nullopt;
  }
  double ratio_bound(double) const override { return INFINITY; }
  double ratio_anchor() const override { return INFINITY; }
  std::optional<double> log_derivative_bound() const override { return std::nullopt; }
  std::string expression() const override {
    return "ell(b=" + fmt(b) + ",L=" + L.expression() + ")";
  }
};

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

}  // namespace

RegularlyVaryingFn::RegularlyVaryingFn() : RegularlyVaryingFn(constant(1.0)) {}

RegularlyVaryingFn::RegularlyVaryingFn(std::vector<std::shared_ptr<const Factor>> factors)
    : factors_(std::move(factors)) {}

RegularlyVaryingFn RegularlyVaryingFn::constant(double c) {
  require(std::isfinite(c) && c > 0, "const: value must be finite and > 0");
  return RegularlyVaryingFn({std::make_shared<ConstantFactor>(c)});
}

RegularlyVaryingFn RegularlyVaryingFn::power(double rho, double clamp) {
  require(std::isfinite(rho), "pow: exponent must be finite");
  require(std::isfinite(clamp) && clamp > 0, "pow: clamp point must be finite and > 0");
  return RegularlyVaryingFn({std::make_shared<PowerFactor>(rho, clamp)});
}

RegularlyVaryingFn RegularlyVaryingFn::shifted_power(double rho) {
  require(std::isfinite(rho), "spow: exponent must be finite");
  return RegularlyVaryingFn({std::make_shared<ShiftedPowerFactor>(rho)});
}

RegularlyVaryingFn RegularlyVaryingFn::log_power(double kappa) {
  require(std::isfinite(kappa), "logpow: exponent must be finite");
  return RegularlyVaryingFn({std::make_shared<LogPowerFactor>(kappa)});
}

RegularlyVaryingFn RegularlyVaryingFn::tabulated(std::vector<double> xs, std::vector<double> ys) {
  require(xs.size() == ys.size(), "table: x and y lengths differ");
  require(xs.size() >= 2, "table: at least two knots required");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(std::isfinite(xs[i]) && xs[i] > 0, "table: knots must be finite and > 0");
    require(std::isfinite(ys[i]) && ys[i] > 0, "table: values must be finite and > 0");
    if (i) require(xs[i] > xs[i - 1], "table: knots must be strictly increasing");
  }
  return RegularlyVaryingFn({std::make_shared<TableFactor>(std::move(xs), std::move(ys))});
}

RegularlyVaryingFn RegularlyVaryingFn::operator*(const RegularlyVaryingFn& other) const {
  auto f = factors_;
  f.insert(f.end(), other.factors_.begin(), other.factors_.end());
  // Drop unit constants introduced by the default constructor.
  std::erase_if(f, [](const auto& p) {
    auto c = dynamic_cast<const ConstantFactor*>(p.get());
    return c && c->c == 1.0;
  });
  if (f.empty()) return constant(1.0);
  return RegularlyVaryingFn(std::move(f));
}

double RegularlyVaryingFn::operator()(double x) const {
  if (!std::isfinite(x)) throw InvalidArgument("g: argument must be finite");
  if (x < 0) throw InvalidArgument("g: argument must be >= 0");
  double v = 1.0;
  for (const auto& f : factors_) v *= f->value(x);
  return v;
}

double RegularlyVaryingFn::log_value(double x) const {
  if (!(x >= 0)) throw InvalidArgument("g: argument must be >= 0");
  if (std::isinf(x)) throw InvalidArgument("g: argument must be finite");
  double v = 0.0;
  for (const auto& f : factors_) v += f->log_value(x);
  return v;
}

double RegularlyVaryingFn::log_value_at_exp(double u) const {
  if (std::isnan(u)) throw InvalidArgument("g: argument must not be NaN");
  double v = 0.0;
  for (const auto& f : factors_) v += f->log_value_at_exp(u);
  return v;
}

double RegularlyVaryingFn::index() const noexcept {
  double r = 0.0;
  for (const auto& f : factors_) r += f->index();
  return r;
}

bool RegularlyVaryingFn::has_derivative() const noexcept {
  return std::all_of(factors_.begin(), factors_.end(),
                     [](const auto& f) { return f->has_derivative(); });
}

double RegularlyVaryingFn::derivative(double x) const {
  if (!has_derivative()) throw InvalidArgument("g has no derivative");
  if (!std::isfinite(x) || x < 0) throw InvalidArgument("g': argument must be finite and >= 0");
  double total = 0.0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    double term = factors_[i]->derivative(x);
    for (std::size_t j = 0; j < factors_.size(); ++j) {
      if (j != i) term *= factors_[j]->value(x);
    }
    total += term;
  }
  return total;
}

bool RegularlyVaryingFn::is_constant() const noexcept {
  return std::all_of(factors_.begin(), factors_.end(),
                     [](const auto& f) { return f->is_constant(); });
}

std::optional<double> RegularlyVaryingFn::limit_at_infinity() const {
  double product = 1.0;
  bool has_zero = false;
  bool has_inf = false;
  for (const auto& f : factors_) {
    auto l = f->limit();
    if (!l) return std::nullopt;
    if (*l == 0.0) has_zero = true;
    else if (std::isinf(*l)) has_inf = true;
    else product *= *l;
  }
  if (has_zero && has_inf) {
    // Decided by the index alone.
    const double rho = index();
    if (rho > 0) return INFINITY;
    if (rho < 0) return 0.0;
    return std::nullopt;
  }
  if (has_zero) return 0.0;
  if (has_inf) return INFINITY;
  return product;
}

double RegularlyVaryingFn::forward_ratio_bound(double x) const {
  double r = 1.0;
  for (const auto& f : factors_) r *= f->ratio_bound(x);
  return r;
}

double RegularlyVaryingFn::ratio_anchor() const noexcept {
  double a = 0.0;
  for (const auto& f : factors_) a = std::max(a, f->ratio_anchor());
  return a;
}

std::optional<double> RegularlyVaryingFn::log_derivative_bound() const {
  double k = 0.0;
  for (const auto& f : factors_) {
    auto b = f->log_derivative_bound();
    if (!b) return std::nullopt;
    k += *b;
  }
  return k;
}

std::string RegularlyVaryingFn::expression() const {
  if (factors_.size() == 1) return factors_.front()->expression();
  std::string s = "mul(";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) s += ",";
    s += factors_[i]->expression();
  }
  return s + ")";
}

RegularlyVaryingFn build_ell(const RegularlyVaryingFn& L, double b) {
  require(std::isfinite(b) && b > 1.0, "build_ell: base b must be > 1");
  require(std::fabs(L.index()) < 1e-12, "build_ell: L must be slowly varying (index 0)");
  // Closed forms: L constant, or L = C log(e+x).
  auto method = IntegratedFactor::Method::quadrature;
  double scale = 1.0;
  int log_factors = 0;
  bool other = false;
  for (const auto& f : L.factors_) {
    if (f->is_constant()) {
      scale *= f->value(0.0);
    } else if (auto lp = dynamic_cast<const LogPowerFactor*>(f.get()); lp && lp->kappa == 1.0) {
      ++log_factors;
    } else {
      other = true;
    }
  }
  if (!other && log_factors == 0) method = IntegratedFactor::Method::linear;
  if (!other && log_factors == 1) method = IntegratedFactor::Method::log_linear;
  return RegularlyVaryingFn({std::make_shared<IntegratedFactor>(L, b, method, scale)});
}

PhiFunction::PhiFunction(double q, RegularlyVaryingFn g)
    : q_(q), g_(std::move(g)), exponent_(1.0 / (1.0 - q)), constant_g_(g_.is_constant()) {
  require(std::isfinite(q) && q >= 0.0 && q < 1.0, "phi: q must lie in [0, 1)");
  if (constant_g_) constant_factor_ = std::pow(g_(0.0), -0.5 * exponent_);
}

double PhiFunction::operator()(double x) const {
  if (!std::isfinite(x) || x < 0.0 || x >= 1.0) {
    throw InvalidArgument("phi: argument must lie in [0, 1)");
  }
  if (x == 0.0) return 0.0;
  return eval_unchecked(x);
}

double PhiFunction::eval_unchecked(double x) const noexcept {
  if (constant_g_) return std::pow(x, exponent_) * constant_factor_;
  const double y = -std::log2(x) * exponent_;
  return std::pow(x, exponent_) * std::exp(-0.5 * exponent_ * g_.log_value(y));
}

double PhiFunction::log_eval_at_log(double v) const {
  if (!(v < 0.0)) throw InvalidArgument("phi: log-argument must be < 0");
  if (v == -INFINITY) return -INFINITY;
  const double y = -v / std::numbers::ln2 * exponent_;
  return exponent_ * v - 0.5 * exponent_ * g_.log_value(y);
}

}  // namespace phivar
