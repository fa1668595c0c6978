#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phivar {

// Base of every error raised by the library. The CLI maps subclasses to
// process exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

// Argument outside the documented domain of an operation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

// An increment reached the edge of a gauge's domain [0, 1).
class GaugeDomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "gauge_domain"; }
};

// A level, depth or memory cap would be exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "cap_exceeded"; }
};

// A theorem hypothesis the operation relies on does not hold for the input
// (negative coefficients, divergent s_n^2, unequal coefficient prefix...).
class HypothesisViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "hypothesis"; }
};

// Aggregated configuration errors: parsing collects every violation before
// throwing.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }
  const char* kind() const noexcept override { return "config"; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace phivar
