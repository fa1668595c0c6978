#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phivar/regvar.hpp"
#include "phivar/scheme.hpp"
#include "phivar/sign_field.hpp"

namespace phivar {

// Phi(x) = x^p.
struct PowerGauge {
  double p = 1.0;
};

using Gauge = std::variant<PowerGauge, PhiFunction>;

// "power:p=2" or "phi:q=0,g=pow:1".
std::string describe(const Gauge& gauge);

enum class Mode { enumerate, binomial, mc };

std::string to_string(Mode mode);

struct ModeSpec {
  Mode mode = Mode::enumerate;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
};

struct VariationReport {
  std::size_t n = 0;
  double t = 1.0;
  std::string gauge;
  Mode mode = Mode::enumerate;
  double value = 0.0;
  double stderr_ = 0.0;
  double seconds = 0.0;
  std::uint64_t terms = 0;  // floor(t 2^n) + 1, or 0 at t = 0
  std::uint64_t samples = 0;
  std::optional<std::uint64_t> seed;
};

// Number of fixed enumeration blocks; partial sums are reduced in block
// order, so results do not depend on the worker count.
inline constexpr std::size_t kEnumerationBlocks = 256;

// V_{n,t} = sum_{k=0}^{K} Phi(|Delta_{n,k}|), K = min(floor(t 2^n), 2^n - 1);
// 0 at t = 0. Phi_q gauges require 2^{-n} sum_{m<n} |beta_m| < 1 and raise
// GaugeDomainError otherwise.
VariationReport variation_enumerate(const CoefficientScheme& scheme, const SignField& signs,
                                    const Gauge& gauge, std::size_t n, double t,
                                    unsigned threads = 0);

// sum_j C(n, j) Phi(2^{-n} |beta| |n - 2j|) in log space, for t = 1, classic
// signs and |beta_0| = ... = |beta_{n-1}|. Throws HypothesisViolation when
// the prefix is unequal or the signs are not classic.
VariationReport variation_binomial(const CoefficientScheme& scheme, const SignField& signs,
                                   const Gauge& gauge, std::size_t n, double t = 1.0);

// (K + 1) times the mean of Phi(|Delta_{n,k}|) over `samples` uniform draws
// of k in [0, K]; stderr is (K + 1) sd / sqrt(samples).
VariationReport variation_mc(const CoefficientScheme& scheme, const SignField& signs,
                             const Gauge& gauge, std::size_t n, double t, std::uint64_t samples,
                             std::uint64_t seed, unsigned threads = 0);

VariationReport variation(const CoefficientScheme& scheme, const SignField& signs,
                          const Gauge& gauge, std::size_t n, double t, const ModeSpec& mode,
                          unsigned threads = 0);

struct TheoreticalLimit {
  double value = 0.0;
  std::string source;
};

// The limit of V_{n,t} as n grows, when the scheme's profile determines it:
//   Phi_q gauge whose g matches the scheme   E|Z|^{1/(1-q)} t, sqrt(2/pi) t at q = 0
//   power p at p = 1/(1-q), s_n^2 ~ c 2^{2qn}   c^{p/2} E|Z|^p t
//   power p above the critical exponent       0
//   bounded variation, p = 1                  E|Ztilde| t
std::optional<TheoreticalLimit> theoretical_limit(const CoefficientScheme& scheme,
                                                  const Gauge& gauge, double t,
                                                  unsigned threads = 0);

struct StudyResult {
  std::vector<VariationReport> reports;
  std::optional<TheoreticalLimit> limit;
  std::vector<std::optional<double>> deviations;  // value - limit
};

StudyResult convergence_study(const CoefficientScheme& scheme, const SignField& signs,
                              const Gauge& gauge, const std::vector<std::size_t>& n_list,
                              double t, const ModeSpec& mode, unsigned threads = 0);

enum class Trend { diverging, vanishing, stable };

std::string to_string(Trend trend);

inline constexpr double kTrendThreshold = 0.05;

struct Classification {
  Trend trend = Trend::stable;
  double slope = 0.0;  // d log2 V / dn over the last half of the range
  std::vector<std::size_t> n;
  std::vector<double> values;
  std::vector<double> khintchine;  // V / (2^{n(1-r)} s_n^r)
  double khintchine_spread = 0.0;  // max / min of khintchine
  Mode mode = Mode::enumerate;
};

// Classifies V_n^{(r)} over [n_first, n_last] by the least-squares slope of
// log2 V_n over the last half of the range: above +kTrendThreshold per level
// diverging, below -kTrendThreshold vanishing, otherwise stable. Uses the
// binomial engine when the beta prefix is equal, enumeration otherwise.
Classification classify_power_variation(const CoefficientScheme& scheme, double r,
                                        std::size_t n_first, std::size_t n_last,
                                        unsigned threads = 0);

}  // namespace phivar
