#include "phivar/variation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "phivar/dyadic.hpp"
#include "phivar/error.hpp"
#include "phivar/limits.hpp"
#include "phivar/numerics.hpp"
#include "phivar/parallel.hpp"
#include "phivar/path_io.hpp"

namespace phivar {

std::string describe(const Gauge& gauge) {
  if (const auto* p = std::get_if<PowerGauge>(&gauge)) return "power:p=" + format_double(p->p);
  const auto& phi = std::get<PhiFunction>(gauge);
  return "phi:q=" + format_double(phi.q()) + ",g=" + phi.g().expression();
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::enumerate: return "enumerate";
    case Mode::binomial: return "binomial";
    case Mode::mc: return "mc";
  }
  return "enumerate";
}

std::string to_string(Trend trend) {
  switch (trend) {
    case Trend::diverging: return "diverging";
    case Trend::vanishing: return "vanishing";
    case Trend::stable: return "stable";
  }
  return "stable";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate(const Gauge& gauge, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("variation: t must lie in [0, 1]");
  if (const auto* p = std::get_if<PowerGauge>(&gauge)) {
    if (!(p->p > 0.0) || !std::isfinite(p->p)) {
      throw InvalidArgument("variation: power exponent must be > 0");
    }
  }
}

// floor(t 2^n) clamped to 2^n - 1.
std::uint64_t last_index(std::size_t n, double t) {
  const double k = std::floor(std::ldexp(t, static_cast<int>(n)));
  const double top = std::ldexp(1.0, static_cast<int>(n)) - 1.0;
  return static_cast<std::uint64_t>(std::min(k, top));
}

// Phi gauges live on [0, 1): check the a-priori bound on |Delta|.
void guard_domain(const Gauge& gauge, double log2_bound) {
  if (!std::holds_alternative<PhiFunction>(gauge)) return;
  if (!(log2_bound < 0.0)) {
    throw GaugeDomainError("increments may reach 1 (bound 2^" + format_double(log2_bound) +
                           "); Phi_q is defined on [0, 1) only");
  }
}

double log2_increment_bound(const CoefficientScheme& scheme, std::size_t n) {
  CompensatedSum s;
  for (std::size_t m = 0; m < n; ++m) s.add(std::fabs(scheme.beta(m)));
  return std::log2(s.value()) - static_cast<double>(n);
}

struct AbsGauge {
  double operator()(double x) const noexcept { return std::fabs(x); }
};
struct SquareGauge {
  double operator()(double x) const noexcept { return x * x; }
};
struct PowGauge {
  double p;
  double operator()(double x) const noexcept { return std::pow(std::fabs(x), p); }
};
struct PhiGauge {
  const PhiFunction* phi;
  double operator()(double x) const noexcept {
    const double a = std::fabs(x);
    return a == 0.0 ? 0.0 : phi->eval_unchecked(a);
  }
};

template <class F>
decltype(auto) with_gauge(const Gauge& gauge, F&& f) {
  if (const auto* p = std::get_if<PowerGauge>(&gauge)) {
    if (p->p == 1.0) return f(AbsGauge{});
    if (p->p == 2.0) return f(SquareGauge{});
    return f(PowGauge{p->p});
  }
  return f(PhiGauge{&std::get<PhiFunction>(gauge)});
}

template <class G>
double enumerate_sum(const std::vector<double>& betas, const SignField& signs,
                     std::uint64_t terms, unsigned threads, G g) {
  const std::size_t blocks =
      static_cast<std::size_t>(std::min<std::uint64_t>(kEnumerationBlocks, terms));
  std::vector<CompensatedSum> partial(blocks);
  for_each_block(blocks, threads, [&](std::size_t b) {
    const std::uint64_t begin = terms * b / blocks;
    const std::uint64_t end = terms * (b + 1) / blocks;
    IncrementWalker w(betas, signs);
    w.seek(begin);
    CompensatedSum s;
    for (std::uint64_t k = begin;;) {
      s.add(g(w.value()));
      if (++k == end) break;
      w.advance();
    }
    partial[b] = s;
  });
  CompensatedSum total;
  for (const auto& p : partial) total.add(p);
  return total.value();
}

}  // namespace

VariationReport variation_enumerate(const CoefficientScheme& scheme, const SignField& signs,
                                    const Gauge& gauge, std::size_t n, double t,
                                    unsigned threads) {
  const auto start = Clock::now();
  validate(gauge, t);
  if (n == 0 || n > kEnumerationCap) {
    throw CapExceeded("enumeration level must lie in [1, " + std::to_string(kEnumerationCap) +
                      "]");
  }
  VariationReport rep;
  rep.n = n;
  rep.t = t;
  rep.gauge = describe(gauge);
  rep.mode = Mode::enumerate;
  if (t > 0.0) {
    guard_domain(gauge, log2_increment_bound(scheme, n));
    rep.terms = last_index(n, t) + 1;
    const auto betas = scheme.betas(n);
    const unsigned workers = resolve_threads(threads);
    rep.value = with_gauge(gauge, [&](auto g) {
      return enumerate_sum(betas, signs, rep.terms, workers, g);
    });
  }
  rep.seconds = seconds_since(start);
  return rep;
}

VariationReport variation_binomial(const CoefficientScheme& scheme, const SignField& signs,
                                   const Gauge& gauge, std::size_t n, double t) {
  const auto start = Clock::now();
  validate(gauge, t);
  if (t != 1.0) throw InvalidArgument("binomial engine requires t = 1");
  if (n == 0) throw InvalidArgument("binomial engine requires n >= 1");
  if (!signs.is_classic()) {
    throw HypothesisViolation("binomial engine requires classic signs; use enumerate or mc");
  }
  if (!scheme.equal_abs_beta_prefix(n)) {
    throw HypothesisViolation("binomial engine requires |beta_0| = ... = |beta_{n-1}|; "
                              "use enumerate or mc");
  }
  const double log2_beta = scheme.log2_abs_beta(0);
  const double nn = static_cast<double>(n);
  guard_domain(gauge, log2_beta + std::log2(nn) - nn);

  VariationReport rep;
  rep.n = n;
  rep.t = t;
  rep.gauge = describe(gauge);
  rep.mode = Mode::binomial;
  rep.terms = n < 64 ? (std::uint64_t{1} << n) : 0;
  if (std::isinf(log2_beta)) {
    rep.seconds = seconds_since(start);
    return rep;
  }

  // log Phi(x) for x = |beta| |n - 2j| 2^{-n}, given log x.
  auto log_phi = [&](double log_x) {
    if (const auto* p = std::get_if<PowerGauge>(&gauge)) return p->p * log_x;
    return std::get<PhiFunction>(gauge).log_eval_at_log(log_x);
  };
  const double ln2 = std::numbers::ln2;
  std::vector<double> logs;
  logs.reserve(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double dist = std::fabs(nn - 2.0 * static_cast<double>(j));
    if (dist == 0.0) continue;
    const double log_x = (log2_beta - nn) * ln2 + std::log(dist);
    logs.push_back(log_binomial(n, j) + log_phi(log_x));
  }
  if (!logs.empty()) {
    const double top = *std::max_element(logs.begin(), logs.end());
    CompensatedSum s;
    for (double l : logs) s.add(std::exp(l - top));
    rep.value = std::exp(top) * s.value();
  }
  rep.seconds = seconds_since(start);
  return rep;
}

VariationReport variation_mc(const CoefficientScheme& scheme, const SignField& signs,
                             const Gauge& gauge, std::size_t n, double t, std::uint64_t samples,
                             std::uint64_t seed, unsigned threads) {
  const auto start = Clock::now();
  validate(gauge, t);
  if (samples < 100) throw InvalidArgument("mc: need at least 100 samples");
  if (n == 0 || n > kIncrementCap) {
    throw CapExceeded("mc level must lie in [1, " + std::to_string(kIncrementCap) + "]");
  }
  VariationReport rep;
  rep.n = n;
  rep.t = t;
  rep.gauge = describe(gauge);
  rep.mode = Mode::mc;
  rep.seed = seed;
  if (t > 0.0) {
    guard_domain(gauge, log2_increment_bound(scheme, n));
    const std::uint64_t last = last_index(n, t);
    rep.terms = last + 1;
    rep.samples = samples;
    const auto betas = scheme.betas(n);
    constexpr std::size_t kChunks = 64;
    std::vector<MomentAccumulator> acc(kChunks);
    with_gauge(gauge, [&](auto g) {
      for_each_block(kChunks, resolve_threads(threads), [&](std::size_t c) {
        std::mt19937_64 rng(
            SignField::mix(seed ^ SignField::mix(0xA0761D6478BD642FULL * (c + 1))));
        std::uniform_int_distribution<std::uint64_t> pick(0, last);
        IncrementWalker w(betas, signs);
        const std::uint64_t count = samples * (c + 1) / kChunks - samples * c / kChunks;
        for (std::uint64_t i = 0; i < count; ++i) {
          w.seek(pick(rng));
          acc[c].add(g(w.value()));
        }
      });
      return 0;
    });
    MomentAccumulator total;
    for (const auto& a : acc) total.merge(a);
    const double scale = static_cast<double>(rep.terms);
    rep.value = scale * total.mean;
    rep.stderr_ = scale * total.standard_error();
  } else {
    rep.samples = 0;
  }
  rep.seconds = seconds_since(start);
  return rep;
}

VariationReport variation(const CoefficientScheme& scheme, const SignField& signs,
                          const Gauge& gauge, std::size_t n, double t, const ModeSpec& mode,
                          unsigned threads) {
  switch (mode.mode) {
    case Mode::enumerate: return variation_enumerate(scheme, signs, gauge, n, t, threads);
    case Mode::binomial: return variation_binomial(scheme, signs, gauge, n, t);
    case Mode::mc:
      return variation_mc(scheme, signs, gauge, n, t, mode.samples, mode.seed, threads);
  }
  throw InvalidArgument("unknown mode");
}

namespace {

// E|Z|^r: 1 exactly at r = 2, otherwise the midpoint of the depth-20
// enumeration interval.
double moment_of_Z(double q, double r, unsigned threads) {
  if (r == 2.0) return 1.0;
  return moment_Z(ConvolutionSpec{q, 20}, r, EstimateMethod::exact(20), threads).value;
}

// Does the gauge's g describe the growth s_n^2 ~ 2^{2qn} g(n) of the scheme?
bool growth_matches(const CoefficientScheme& scheme, const RegularlyVaryingFn& g) {
  auto close = [&](auto&& reference) {
    for (double x : {1e4, 1e8}) {
      if (std::fabs(g.log_value(x) - reference(x)) > 1e-3) return false;
    }
    return true;
  };
  switch (scheme.kind()) {
    case SchemeKind::takagi:
      return close([](double x) { return std::log(x); });
    case SchemeKind::geometric: {
      const double r = 4.0 * scheme.a() * scheme.a();
      if (r == 1.0) return close([](double x) { return std::log(x); });
      if (r < 1.0) return false;
      return close([r](double) { return -std::log(r - 1.0); });
    }
    case SchemeKind::prescribed_q:
    case SchemeKind::prescribed_q0:
      return close([&](double x) { return scheme.g().log_value(x); });
    default:
      return false;
  }
}

}  // namespace

std::optional<TheoreticalLimit> theoretical_limit(const CoefficientScheme& scheme,
                                                  const Gauge& gauge, double t,
                                                  unsigned threads) {
  const auto prof = scheme.profile();
  if (!prof) return std::nullopt;
  if (const auto* phi = std::get_if<PhiFunction>(&gauge)) {
    if (prof->bounded_variation || std::fabs(prof->q - phi->q()) > 1e-12) return std::nullopt;
    if (!growth_matches(scheme, phi->g())) return std::nullopt;
    if (phi->q() == 0.0) {
      return TheoreticalLimit{std::sqrt(2.0 / std::numbers::pi) * t, "sqrt(2/pi) t"};
    }
    return TheoreticalLimit{moment_of_Z(phi->q(), phi->exponent(), threads) * t,
                            "E|Z|^" + format_double(phi->exponent()) + " t"};
  }
  const double p = std::get<PowerGauge>(gauge).p;
  if (prof->bounded_variation) {
    if (p == 1.0) {
      const auto tv = total_variation_expectation(scheme, EstimateMethod::exact(20), threads);
      return TheoreticalLimit{tv.value * t, "E|Ztilde| t"};
    }
    if (p > 1.0) return TheoreticalLimit{0.0, "bounded variation, p > 1"};
    return std::nullopt;
  }
  const double critical = 1.0 / (1.0 - prof->q);
  if (p > critical + 1e-12) return TheoreticalLimit{0.0, "p above critical exponent"};
  if (p < critical - 1e-12 || prof->q == 0.0) return std::nullopt;
  if (!prof->g_limit || !std::isfinite(*prof->g_limit) || !(*prof->g_limit > 0.0)) {
    return std::nullopt;
  }
  const double c = *prof->g_limit;
  return TheoreticalLimit{std::pow(c, 0.5 * p) * moment_of_Z(prof->q, p, threads) * t,
                          "c^{p/2} E|Z|^p t"};
}

StudyResult convergence_study(const CoefficientScheme& scheme, const SignField& signs,
                              const Gauge& gauge, const std::vector<std::size_t>& n_list,
                              double t, const ModeSpec& mode, unsigned threads) {
  if (n_list.empty()) throw InvalidArgument("study: empty level list");
  StudyResult out;
  out.limit = theoretical_limit(scheme, gauge, t, threads);
  for (std::size_t n : n_list) {
    out.reports.push_back(variation(scheme, signs, gauge, n, t, mode, threads));
    if (out.limit) {
      out.deviations.emplace_back(out.reports.back().value - out.limit->value);
    } else {
      out.deviations.emplace_back(std::nullopt);
    }
  }
  return out;
}

Classification classify_power_variation(const CoefficientScheme& scheme, double r,
                                        std::size_t n_first, std::size_t n_last,
                                        unsigned threads) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw InvalidArgument("classify: r must be >= 1");
  if (n_first == 0 || n_last < n_first + 1) {
    throw InvalidArgument("classify: need 1 <= n_first < n_last");
  }
  const Gauge gauge = PowerGauge{r};
  const auto classic = SignField::classic();
  const auto log2_s2 = scheme.log2_s_squared_prefix(n_last);
  Classification c;
  c.mode = scheme.equal_abs_beta_prefix(n_last) ? Mode::binomial : Mode::enumerate;
  for (std::size_t n = n_first; n <= n_last; ++n) {
    const auto rep = c.mode == Mode::binomial ? variation_binomial(scheme, classic, gauge, n)
                                              : variation_enumerate(scheme, classic, gauge, n,
                                                                    1.0, threads);
    const double nn = static_cast<double>(n);
    c.n.push_back(n);
    c.values.push_back(rep.value);
    c.khintchine.push_back(
        std::exp2(std::log2(rep.value) - nn * (1.0 - r) - 0.5 * r * log2_s2[n]));
  }
  // Least-squares slope over the last half.
  const std::size_t first = c.n.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = static_cast<double>(c.n.size() - first);
  for (std::size_t i = first; i < c.n.size(); ++i) {
    const double x = static_cast<double>(c.n[i]);
    const double y = std::log2(c.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  c.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  if (c.slope > kTrendThreshold) {
    c.trend = Trend::diverging;
  } else if (c.slope < -kTrendThreshold) {
    c.trend = Trend::vanishing;
  } else {
    c.trend = Trend::stable;
  }
  const auto [lo, hi] = std::minmax_element(c.khintchine.begin(), c.khintchine.end());
  c.khintchine_spread = *hi / *lo;
  return c;
}

}  // namespace phivar
