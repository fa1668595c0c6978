#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "phivar/regvar.hpp"
#include "phivar/scheme.hpp"

namespace phivar {

// Extremes of q_n = (1/n) log2 s_n over a level range.
struct CriticalExponents {
  std::size_t n_first = 0;
  std::size_t n_last = 0;
  double q_lower = 0.0;  // min q_n, estimate of q_*
  double q_upper = 0.0;  // max q_n, estimate of q^*
  std::size_t n_at_lower = 0;
  std::size_t n_at_upper = 0;
  double q_last = 0.0;
  // 1/(1 - q_last); nullopt when q_last >= 1.
  std::optional<double> p_critical;
  std::vector<double> q_n;  // q_n for n = n_first..n_last

  // p (1 - q_*) > 1: the p-th variation has liminf 0.
  bool expects_vanishing_liminf(double p) const noexcept { return p * (1.0 - q_lower) > 1.0; }
  // p (1 - q^*) < 1: the p-th variation has limsup infinity.
  bool expects_infinite_limsup(double p) const noexcept { return p * (1.0 - q_upper) < 1.0; }
};

// Throws InvalidArgument for an empty range or n_first == 0.
CriticalExponents critical_exponents(const CoefficientScheme& scheme, std::size_t n_first,
                                     std::size_t n_last);

enum class Verdict { converges, inconclusive };

std::string to_string(Verdict v);

struct ConditionRow {
  std::size_t n = 0;
  // beta_n^2 / L(b^n)
  std::optional<double> ratio_i;
  // s_n^2 / ell(b^n)
  std::optional<double> ratio_ii;
  // beta_n^2 / (2^{2qn} ell(b^n))
  std::optional<double> ratio_iii;
  // s_n^2 / (2^{2qn} ell(b^n))
  std::optional<double> ratio_iv;
  // s_{n-1}^2 / s_n^2
  double successive = 0.0;
};

struct ConditionReport {
  double q = 0.0;
  double b = 2.0;
  std::vector<ConditionRow> rows;
  // Targets and verdicts for (i)..(iv). A condition that does not apply
  // (no L given, or the wrong regime for q) is inconclusive with a NaN target.
  std::array<double, 4> targets{};
  std::array<Verdict, 4> verdicts{Verdict::inconclusive, Verdict::inconclusive,
                                  Verdict::inconclusive, Verdict::inconclusive};
  // Last s_{n-1}^2 / s_n^2 and its expected limit 2^{-2q}.
  double successive_estimate = 0.0;
  double successive_target = 1.0;
  Verdict successive_verdict = Verdict::inconclusive;
};

struct ConditionInput {
  double q = 0.0;
  double b = 2.0;
  // L for (i) at q = 0. When ell is absent it is built from L.
  std::optional<RegularlyVaryingFn> L;
  std::optional<RegularlyVaryingFn> ell;
};

inline constexpr std::size_t kVerdictWindow = 10;
inline constexpr double kVerdictTolerance = 0.01;

// Tabulates the ratios of conditions (i)-(iv) for n in [n_first, n_last]
// (computed in log space) and marks a condition as converging when its last
// kVerdictWindow ratios all lie within kVerdictTolerance of the target.
// Conditions (i), (ii) apply at q = 0, (iii), (iv) at q > 0.
ConditionReport check_conditions(const CoefficientScheme& scheme, const ConditionInput& input,
                                 std::size_t n_first, std::size_t n_last);

}  // namespace phivar
