#pragma once

#include <cstdint>
#include <span>

namespace phivar {

// Neumaier's variant of Kahan summation. Order dependent, so callers that
// need reproducible results must feed terms in a fixed order.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  void add(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  static double abs(double x) noexcept { return x < 0 ? -x : x; }

  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Running mean / variance (Welford), mergeable with Chan's update.
struct MomentAccumulator {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const MomentAccumulator& o) noexcept;

  // Unbiased sample variance; 0 with fewer than two samples.
  double variance() const noexcept;
  double standard_error() const noexcept;
};

// log C(n, k) via lgamma.
double log_binomial(std::uint64_t n, std::uint64_t k);

// Dilogarithm Li2(x) for real x <= 1.
double dilog(double x);

// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b) noexcept;

// Standard normal density and distribution function. The CDF uses the
// Didonato-Morris rational approximation of erfc (DCDFLIB erfc1), whose
// absolute error is below 1e-14; it is pinned so that Wasserstein values are
// reproducible independent of the platform libm.
double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
double erfc_rational(double x) noexcept;

// Integral of |F(x) - N(x)| over the real line, where F is the distribution
// function of a discrete law with sorted atoms and matching probabilities and
// N is the standard normal CDF. Atoms must be strictly increasing.
double w1_to_standard_normal(std::span<const double> atoms, std::span<const double> probs);

}  // namespace phivar
