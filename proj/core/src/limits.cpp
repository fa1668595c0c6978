#include "phivar/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "phivar/error.hpp"
#include "phivar/numerics.hpp"
#include "phivar/parallel.hpp"
#include "phivar/path_io.hpp"
#include "phivar/sign_field.hpp"

namespace phivar {

namespace {

constexpr std::size_t kSampleChunks = 64;

void require_q(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidArgument("convolution: q must be > 0");
}

std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk) {
  return SignField::mix(seed ^ SignField::mix(0xD1B54A32D192ED03ULL * (chunk + 1)));
}

// Runs fill(chunk, rng, begin, end) over kSampleChunks fixed slices of
// [0, samples).
template <class Fill>
void for_each_sample_chunk(std::uint64_t samples, std::uint64_t seed, unsigned threads,
                           Fill&& fill) {
  for_each_block(kSampleChunks, resolve_threads(threads), [&](std::size_t c) {
    const std::uint64_t begin = samples * c / kSampleChunks;
    const std::uint64_t end = samples * (c + 1) / kSampleChunks;
    std::mt19937_64 rng(chunk_seed(seed, c));
    fill(c, rng, begin, end);
  });
}

double signed_sum(std::span<const double> coeffs, std::mt19937_64& rng) {
  double v = 0.0;
  std::uint64_t bits = 0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    if ((m & 63U) == 0) bits = rng();
    v += (bits & 1U) ? -coeffs[m] : coeffs[m];
    bits >>= 1;
  }
  return v;
}

std::vector<double> z_coefficients(double q, std::size_t depth) {
  const double lambda = std::sqrt(std::expm1(2.0 * q * std::numbers::ln2));
  std::vector<double> c(depth);
  for (std::size_t m = 1; m <= depth; ++m) c[m - 1] = lambda * std::exp2(-q * static_cast<double>(m));
  return c;
}

IntervalEstimate mc_moment(std::span<const double> values, double r) {
  MomentAccumulator acc;
  for (double v : values) acc.add(std::pow(std::fabs(v), r));
  IntervalEstimate e;
  e.method = "mc";
  e.value = acc.mean;
  e.stderr_ = acc.standard_error();
  e.low = e.value - kConfidenceWidth * e.stderr_;
  e.high = e.value + kConfidenceWidth * e.stderr_;
  e.samples = acc.count;
  return e;
}

}  // namespace

double ConvolutionSpec::lambda() const {
  require_q(q);
  return std::sqrt(std::expm1(2.0 * q * std::numbers::ln2));
}

double ConvolutionSpec::truncation_error() const {
  return lambda() * std::exp2(-q * static_cast<double>(depth)) / std::expm1(q * std::numbers::ln2);
}

double ConvolutionSpec::tail_variance() const {
  require_q(q);
  return std::exp2(-2.0 * q * static_cast<double>(depth));
}

std::size_t ConvolutionSpec::depth_for(double q, double tolerance) {
  require_q(q);
  if (!(tolerance > 0.0)) throw InvalidArgument("convolution: tolerance must be > 0");
  ConvolutionSpec s{q, 1};
  while (s.truncation_error() > tolerance) {
    if (++s.depth > 100000) throw CapExceeded("convolution: depth above 100000");
  }
  return s.depth;
}

std::vector<double> sample_signed_sums(std::span<const double> coeffs, std::uint64_t samples,
                                       std::uint64_t seed, unsigned threads) {
  std::vector<double> out(samples);
  for_each_sample_chunk(samples, seed, threads,
                        [&](std::size_t, std::mt19937_64& rng, std::uint64_t b, std::uint64_t e) {
                          for (std::uint64_t i = b; i < e; ++i) out[i] = signed_sum(coeffs, rng);
                        });
  return out;
}

SampleSet sample_Z(const ConvolutionSpec& spec, std::uint64_t samples, std::uint64_t seed,
                   unsigned threads) {
  require_q(spec.q);
  SampleSet s;
  s.depth = std::max(spec.depth, ConvolutionSpec::depth_for(spec.q, kSampleTruncation));
  s.truncation_error = ConvolutionSpec{spec.q, s.depth}.truncation_error();
  s.seed = seed;
  const auto c = z_coefficients(spec.q, s.depth);
  s.values = sample_signed_sums(c, samples, seed, threads);
  return s;
}

IntervalEstimate moment_interval(std::span<const double> coeffs, double tau, double sigma2,
                                 double r, unsigned threads) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw InvalidArgument("moment: r must be >= 1");
  if (coeffs.empty()) throw InvalidArgument("moment: no coefficients");
  if (coeffs.size() > kExactEnumCap) {
    throw CapExceeded("exact enumeration depth above " + std::to_string(kExactEnumCap));
  }
  // Y for the first coefficient is fixed to +1 (the law of |v| is symmetric).
  const std::size_t free_levels = coeffs.size() - 1;
  const std::size_t a_levels = free_levels / 2;
  const std::size_t b_levels = free_levels - a_levels;
  auto table = [&](std::size_t first, std::size_t count, double base) {
    std::vector<double> t(std::size_t{1} << count);
    for (std::size_t i = 0; i < t.size(); ++i) {
      double v = base;
      for (std::size_t j = 0; j < count; ++j) {
        v += ((i >> j) & 1U) ? -coeffs[first + j] : coeffs[first + j];
      }
      t[i] = v;
    }
    return t;
  };
  const auto A = table(1, a_levels, coeffs[0]);
  const auto B = table(1 + a_levels, b_levels, 0.0);

  const double curvature = r * (r - 1.0);
  auto upper = [&](double x) {
    if (x <= tau) return std::pow(x + tau, r);
    if (curvature == 0.0) return std::pow(x, r);
    const double edge = r >= 2.0 ? x + tau : x - tau;
    return std::pow(x, r) + 0.5 * sigma2 * curvature * std::pow(edge, r - 2.0);
  };

  std::vector<CompensatedSum> lows(A.size());
  std::vector<CompensatedSum> highs(A.size());
  for_each_block(A.size(), resolve_threads(threads), [&](std::size_t i) {
    for (double b : B) {
      const double x = std::fabs(A[i] + b);
      lows[i].add(std::pow(x, r));
      highs[i].add(upper(x));
    }
  });
  CompensatedSum lo;
  CompensatedSum hi;
  for (std::size_t i = 0; i < A.size(); ++i) {
    lo.add(lows[i]);
    hi.add(highs[i]);
  }
  const double weight = std::ldexp(1.0, -static_cast<int>(free_levels));
  IntervalEstimate e;
  e.method = "exact-enum";
  e.depth = coeffs.size();
  e.low = lo.value() * weight;
  e.high = std::max(e.low, hi.value() * weight);
  e.value = 0.5 * (e.low + e.high);
  return e;
}

IntervalEstimate moment_Z(const ConvolutionSpec& spec, double r, const EstimateMethod& method,
                          unsigned threads) {
  require_q(spec.q);
  IntervalEstimate e;
  if (method.kind == EstimateMethod::Kind::mc) {
    const auto s = sample_Z(spec, method.samples, method.seed, threads);
    e = mc_moment(s.values, r);
    e.seed = method.seed;
    e.depth = s.depth;
  } else {
    const ConvolutionSpec trunc{spec.q, method.depth};
    if (method.depth == 0) throw InvalidArgument("moment: depth must be >= 1");
    if (method.depth > kExactEnumCap) {
      throw CapExceeded("exact enumeration depth above " + std::to_string(kExactEnumCap));
    }
    const auto c = z_coefficients(spec.q, method.depth);
    e = moment_interval(c, trunc.truncation_error(), trunc.tail_variance(), r, threads);
  }
  e.quantity = "E|Z|^" + format_double(r);
  return e;
}

CouplingReport coupling_distance(const CoefficientScheme& scheme, double q, std::size_t n) {
  require_q(q);
  if (n == 0) throw InvalidArgument("coupling: n must be >= 1");
  for (std::size_t m = 0; m < n; ++m) {
    if (scheme.beta(m) < 0.0) {
      throw HypothesisViolation("coupling: beta_" + std::to_string(m) + " is negative");
    }
  }
  const double half_log2_s2 = 0.5 * scheme.log2_s_squared_prefix(n)[n];
  const double lambda = ConvolutionSpec{q, 1}.lambda();
  CompensatedSum d2;
  for (std::size_t m = 1; m <= n; ++m) {
    const double lb = scheme.log2_abs_beta(n - m);
    const double ratio = std::isinf(lb) ? 0.0 : std::exp2(lb - half_log2_s2);
    const double diff = ratio - lambda * std::exp2(-q * static_cast<double>(m));
    d2.add(diff * diff);
  }
  d2.add(std::exp2(-2.0 * q * static_cast<double>(n)));
  CouplingReport rep;
  rep.n = n;
  rep.q = q;
  rep.exact_l2 = std::sqrt(d2.value());
  return rep;
}

CouplingReport coupling_distance_sampled(const CoefficientScheme& scheme, double q, std::size_t n,
                                         double p, std::uint64_t samples, std::uint64_t seed,
                                         unsigned threads) {
  if (!(p >= 1.0)) throw InvalidArgument("coupling: p must be >= 1");
  CouplingReport rep = coupling_distance(scheme, q, n);
  const std::size_t depth = std::max(n, ConvolutionSpec::depth_for(q, kSampleTruncation));
  const double half_log2_s2 = 0.5 * scheme.log2_s_squared_prefix(n)[n];
  const auto z = z_coefficients(q, depth);
  std::vector<double> d(depth);
  for (std::size_t m = 1; m <= depth; ++m) {
    double ratio = 0.0;
    if (m <= n) {
      const double lb = scheme.log2_abs_beta(n - m);
      ratio = std::isinf(lb) ? 0.0 : std::exp2(lb - half_log2_s2);
    }
    d[m - 1] = ratio - z[m - 1];
  }
  const auto draws = sample_signed_sums(d, samples, seed, threads);
  const auto e = mc_moment(draws, p);
  SampledDistance s;
  s.p = p;
  s.samples = samples;
  s.seed = seed;
  s.value = std::pow(e.value, 1.0 / p);
  s.stderr_ = e.value > 0.0 ? s.value / (p * e.value) * e.stderr_ : 0.0;
  rep.sampled = s;
  return rep;
}

CltReport clt_distance(const CoefficientScheme& scheme, std::size_t n, std::uint64_t samples,
                       std::uint64_t seed, unsigned threads) {
  if (n == 0) throw InvalidArgument("clt: n must be >= 1");
  CltReport rep;
  rep.n = n;
  if (scheme.equal_abs_beta_prefix(n)) {
    if (scheme.beta(0) == 0.0) throw HypothesisViolation("clt: s_n = 0");
    std::vector<double> atoms(n + 1);
    std::vector<double> probs(n + 1);
    const double root = std::sqrt(static_cast<double>(n));
    const double log_half_n = static_cast<double>(n) * std::numbers::ln2;
    for (std::size_t j = 0; j <= n; ++j) {
      atoms[j] = (2.0 * static_cast<double>(j) - static_cast<double>(n)) / root;
      probs[j] = std::exp(log_binomial(n, j) - log_half_n);
    }
    rep.w1 = w1_to_standard_normal(atoms, probs);
    rep.method = "exact-binomial";
    return rep;
  }
  if (samples < 100) throw InvalidArgument("clt: need at least 100 samples");
  const double half_log2_s2 = 0.5 * scheme.log2_s_squared_prefix(n)[n];
  if (std::isinf(half_log2_s2)) throw HypothesisViolation("clt: s_n = 0");
  std::vector<double> c(n);
  for (std::size_t m = 1; m <= n; ++m) {
    const double b = scheme.beta(n - m);
    const double lb = scheme.log2_abs_beta(n - m);
    const double mag = std::isinf(lb) ? 0.0 : std::exp2(lb - half_log2_s2);
    c[m - 1] = b < 0 ? -mag : mag;
  }
  auto draws = sample_signed_sums(c, samples, seed, threads);
  std::sort(draws.begin(), draws.end());
  const std::vector<double> probs(draws.size(), 1.0 / static_cast<double>(draws.size()));
  rep.w1 = w1_to_standard_normal(draws, probs);
  rep.method = "mc";
  rep.samples = samples;
  rep.seed = seed;
  return rep;
}

namespace {

struct TailSums {
  double abs_sum = 0.0;
  double square_sum = 0.0;
};

// sum_{m >= d} |beta_m| and beta_m^2.
TailSums beta_tail(const CoefficientScheme& scheme, std::size_t d) {
  TailSums t;
  if (scheme.kind() == SchemeKind::geometric) {
    const double r = std::fabs(2.0 * scheme.a());
    t.abs_sum = std::pow(r, static_cast<double>(d)) / (1.0 - r);
    t.square_sum = std::pow(r * r, static_cast<double>(d)) / (1.0 - r * r);
    return t;
  }
  CompensatedSum a;
  CompensatedSum s;
  for (std::size_t m = d; m <= scheme.max_level(); ++m) {
    const double b = scheme.beta(m);
    a.add(std::fabs(b));
    s.add(b * b);
  }
  t.abs_sum = a.value();
  t.square_sum = s.value();
  return t;
}

}  // namespace

IntervalEstimate total_variation_expectation(const CoefficientScheme& scheme,
                                             const EstimateMethod& method, unsigned threads) {
  const double last = scheme.beta(scheme.max_level() + 1);
  bool bounded = last * last <= 1e-15;
  if (scheme.kind() == SchemeKind::explicit_list) bounded = true;
  if (auto p = scheme.profile(); p && !p->bounded_variation) bounded = false;
  if (!bounded) {
    throw HypothesisViolation("infinite total variation regime: s_n^2 does not converge for " +
                              scheme.description());
  }
  std::size_t finite_len = scheme.max_level() + 1;
  if (auto last_nz = scheme.last_nonzero_level()) finite_len = *last_nz + 1;

  IntervalEstimate e;
  if (method.kind == EstimateMethod::Kind::mc) {
    std::size_t d = 1;
    while (d < finite_len && beta_tail(scheme, d).abs_sum > kSampleTruncation) ++d;
    const auto c = scheme.betas(d);
    const auto draws = sample_signed_sums(c, method.samples, method.seed, threads);
    e = mc_moment(draws, 1.0);
    e.seed = method.seed;
    e.depth = d;
  } else {
    if (method.depth == 0) throw InvalidArgument("total variation: depth must be >= 1");
    const std::size_t d = std::min(method.depth, finite_len);
    if (d > kExactEnumCap) {
      throw CapExceeded("exact enumeration depth above " + std::to_string(kExactEnumCap));
    }
    const auto c = scheme.betas(d);
    const auto tail = d >= finite_len ? TailSums{} : beta_tail(scheme, d);
    e = moment_interval(c, tail.abs_sum, tail.square_sum, 1.0, threads);
  }
  e.quantity = "E|Ztilde|";
  return e;
}

}  // namespace phivar
