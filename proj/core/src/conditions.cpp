#include "phivar/conditions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "phivar/error.hpp"

namespace phivar {

CriticalExponents critical_exponents(const CoefficientScheme& scheme, std::size_t n_first,
                                     std::size_t n_last) {
  if (n_first == 0 || n_last < n_first) {
    throw InvalidArgument("critical exponents: need 1 <= n_first <= n_last");
  }
  const auto log2_s2 = scheme.log2_s_squared_prefix(n_last);
  CriticalExponents out;
  out.n_first = n_first;
  out.n_last = n_last;
  out.q_lower = INFINITY;
  out.q_upper = -INFINITY;
  for (std::size_t n = n_first; n <= n_last; ++n) {
    const double qn = 0.5 * log2_s2[n] / static_cast<double>(n);
    out.q_n.push_back(qn);
    if (qn < out.q_lower) {
      out.q_lower = qn;
      out.n_at_lower = n;
    }
    if (qn > out.q_upper) {
      out.q_upper = qn;
      out.n_at_upper = n;
    }
  }
  out.q_last = out.q_n.back();
  if (out.q_last < 1.0) out.p_critical = 1.0 / (1.0 - out.q_last);
  return out;
}

std::string to_string(Verdict v) {
  return v == Verdict::converges ? "converges-to-target" : "inconclusive";
}

namespace {

Verdict judge(const std::vector<ConditionRow>& rows, std::optional<double> ConditionRow::*field,
              double target) {
  if (!std::isfinite(target) || rows.size() < kVerdictWindow) return Verdict::inconclusive;
  for (std::size_t i = rows.size() - kVerdictWindow; i < rows.size(); ++i) {
    const auto& r = rows[i].*field;
    if (!r || !std::isfinite(*r)) return Verdict::inconclusive;
    if (std::fabs(*r / target - 1.0) > kVerdictTolerance) return Verdict::inconclusive;
  }
  return Verdict::converges;
}

}  // namespace

ConditionReport check_conditions(const CoefficientScheme& scheme, const ConditionInput& input,
                                 std::size_t n_first, std::size_t n_last) {
  if (!(input.b > 1.0)) throw InvalidArgument("conditions: b must be > 1");
  if (!(input.q >= 0.0) || !std::isfinite(input.q)) {
    throw InvalidArgument("conditions: q must be >= 0");
  }
  if (n_first == 0 || n_last < n_first) {
    throw InvalidArgument("conditions: need 1 <= n_first <= n_last");
  }

  std::optional<RegularlyVaryingFn> ell = input.ell;
  if (!ell && input.L) ell = build_ell(*input.L, input.b);

  const double q = input.q;
  const bool zero_q = q == 0.0;
  const double ln2 = std::numbers::ln2;
  const double log_b = std::log(input.b);
  const auto log2_s2 = scheme.log2_s_squared_prefix(n_last);

  ConditionReport rep;
  rep.q = q;
  rep.b = input.b;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.targets = {zero_q && input.L ? 1.0 : nan, zero_q && ell ? 1.0 : nan,
                 !zero_q && ell ? 1.0 : nan,
                 !zero_q && ell ? 1.0 / std::expm1(2.0 * q * ln2) : nan};
  rep.successive_target = std::exp2(-2.0 * q);

  for (std::size_t n = n_first; n <= n_last; ++n) {
    ConditionRow row;
    row.n = n;
    const double u = static_cast<double>(n) * log_b;  // log b^n
    const double ln_beta2 = 2.0 * scheme.log2_abs_beta(n) * ln2;
    const double ln_s2 = log2_s2[n] * ln2;
    const double ln_growth = 2.0 * q * static_cast<double>(n) * ln2;
    if (zero_q && input.L) row.ratio_i = std::exp(ln_beta2 - input.L->log_value_at_exp(u));
    if (ell) {
      const double ln_ell = ell->log_value_at_exp(u);
      if (zero_q) {
        row.ratio_ii = std::exp(ln_s2 - ln_ell);
      } else {
        row.ratio_iii = std::exp(ln_beta2 - ln_growth - ln_ell);
        row.ratio_iv = std::exp(ln_s2 - ln_growth - ln_ell);
      }
    }
    row.successive = n >= 2 ? std::exp2(log2_s2[n - 1] - log2_s2[n]) : 0.0;
    rep.rows.push_back(row);
  }

  rep.verdicts[0] = judge(rep.rows, &ConditionRow::ratio_i, rep.targets[0]);
  rep.verdicts[1] = judge(rep.rows, &ConditionRow::ratio_ii, rep.targets[1]);
  rep.verdicts[2] = judge(rep.rows, &ConditionRow::ratio_iii, rep.targets[2]);
  rep.verdicts[3] = judge(rep.rows, &ConditionRow::ratio_iv, rep.targets[3]);

  rep.successive_estimate = rep.rows.back().successive;
  bool ok = rep.rows.size() >= kVerdictWindow;
  for (std::size_t i = ok ? rep.rows.size() - kVerdictWindow : 0; ok && i < rep.rows.size(); ++i) {
    const double s = rep.rows[i].successive;
    ok = s > 0.0 && std::fabs(s / rep.successive_target - 1.0) <= kVerdictTolerance;
  }
  rep.successive_verdict = ok ? Verdict::converges : Verdict::inconclusive;
  return rep;
}

}  // namespace phivar
