#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phivar/scheme.hpp"

namespace phivar {

// Z = lambda sum_{m>=1} 2^{-qm} Y_m, lambda = sqrt(2^{2q} - 1), truncated
// after `depth` terms. The remainder W satisfies |W| <= truncation_error()
// and E W^2 = tail_variance() = 2^{-2 q depth}.
struct ConvolutionSpec {
  double q = 0.5;
  std::size_t depth = 40;

  double lambda() const;
  double truncation_error() const;
  double tail_variance() const;
  // Smallest depth with truncation_error() <= tolerance.
  static std::size_t depth_for(double q, double tolerance);
};

struct SampleSet {
  std::vector<double> values;
  std::size_t depth = 0;
  double truncation_error = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr double kSampleTruncation = 1e-9;

// i.i.d. draws of the truncated Z. The depth is raised to
// ConvolutionSpec::depth_for(q, kSampleTruncation) when the requested one is
// too shallow. Samples are generated in a fixed number of chunks with
// derived seeds, so the result does not depend on the thread count.
SampleSet sample_Z(const ConvolutionSpec& spec, std::uint64_t samples, std::uint64_t seed,
                   unsigned threads = 0);

// Seeded draws of sum_m c_m Y_m with i.i.d. symmetric signs.
std::vector<double> sample_signed_sums(std::span<const double> coeffs, std::uint64_t samples,
                                       std::uint64_t seed, unsigned threads = 0);

struct EstimateMethod {
  enum class Kind { mc, exact_enum };
  Kind kind = Kind::exact_enum;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
  std::size_t depth = 20;

  static EstimateMethod mc(std::uint64_t samples, std::uint64_t seed) {
    return {Kind::mc, samples, seed, 0};
  }
  static EstimateMethod exact(std::size_t depth) { return {Kind::exact_enum, 0, 0, depth}; }
};

inline constexpr std::size_t kExactEnumCap = 25;
inline constexpr double kConfidenceWidth = 4.0;

// A value with a guaranteed interval (exact enumeration) or a
// kConfidenceWidth * stderr band (Monte Carlo).
struct IntervalEstimate {
  std::string quantity;
  std::string method;  // "exact-enum" or "mc"
  double value = 0.0;
  double low = 0.0;
  double high = 0.0;
  double stderr_ = 0.0;
  std::optional<std::uint64_t> seed;
  std::uint64_t samples = 0;
  std::size_t depth = 0;
};

// E h(sum_m c_m Y_m + W) for h(v) = |v|^r, r >= 1, where W is an
// independent centred remainder with |W| <= tau and E W^2 = sigma2.
// Enumerates the 2^{d-1} sign patterns left after fixing the first sign.
// Lower end: Jensen, E h(v + W) >= h(v). Upper end: second-order Taylor
// bound when |v| > tau, (|v| + tau)^r otherwise.
IntervalEstimate moment_interval(std::span<const double> coeffs, double tau, double sigma2,
                                 double r, unsigned threads = 0);

// E|Z|^r.
IntervalEstimate moment_Z(const ConvolutionSpec& spec, double r, const EstimateMethod& method,
                          unsigned threads = 0);

struct SampledDistance {
  double p = 2.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
  double stderr_ = 0.0;
};

struct CouplingReport {
  std::size_t n = 0;
  double q = 0.0;
  double exact_l2 = 0.0;
  std::optional<SampledDistance> sampled;
};

// || Z_n / s_n - Z ||_2 with shared signs, Z_n = sum_{m=1}^n beta_{n-m} Y_m:
// the l2 distance of the coefficient vectors. Throws HypothesisViolation
// when some beta_m, m < n, is negative.
CouplingReport coupling_distance(const CoefficientScheme& scheme, double q, std::size_t n);

// Adds a Monte Carlo estimate of || Z_n / s_n - Z ||_p.
CouplingReport coupling_distance_sampled(const CoefficientScheme& scheme, double q, std::size_t n,
                                         double p, std::uint64_t samples, std::uint64_t seed,
                                         unsigned threads = 0);

struct CltReport {
  std::size_t n = 0;
  double w1 = 0.0;
  std::string method;  // "exact-binomial" or "mc"
  std::uint64_t samples = 0;
  std::optional<std::uint64_t> seed;
};

// W1 distance between the law of Z_n / s_n and N(0, 1). Exact when
// |beta_0| = ... = |beta_{n-1}| (shifted binomial law), otherwise from the
// empirical law of `samples` draws.
CltReport clt_distance(const CoefficientScheme& scheme, std::size_t n,
                       std::uint64_t samples = 1000000, std::uint64_t seed = 0,
                       unsigned threads = 0);

// E|sum_{m>=0} beta_m Y_{m+1}|. Throws HypothesisViolation when s_n^2 does
// not converge (beta at the scheme's max level above 1e-15 in square).
IntervalEstimate total_variation_expectation(const CoefficientScheme& scheme,
                                             const EstimateMethod& method, unsigned threads = 0);

}  // namespace phivar
