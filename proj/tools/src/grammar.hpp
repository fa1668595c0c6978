#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "phivar/regvar.hpp"
#include "phivar/scheme.hpp"
#include "phivar/sign_field.hpp"
#include "phivar/variation.hpp"

namespace phivar::cli {

// g-expressions:
//   const:C | pow:RHO[@CLAMP] | spow:RHO | logpow:KAPPA
//   table(X:Y,X:Y,...) | ell(b=B,L=EXPR) | mul(EXPR,EXPR,...)
RegularlyVaryingFn parse_g(std::string_view text);

// Strict decimal parsing; the whole string must be consumed.
double parse_number(std::string_view text, std::string_view what);
std::uint64_t parse_unsigned(std::string_view text, std::string_view what);

// Splits at commas that are not inside parentheses.
std::vector<std::string_view> split_top_level(std::string_view text);

// Scheme as written on the command line or in a config file:
//   takagi[:max=N]
//   geometric:a=A[,max=N]
//   explicit:A0,A1,...
//   faber[:max=N]
//   prescribed-q:q=Q,g=EXPR[,max=N]
//   prescribed-q0:g=EXPR[,max=N]
struct SchemeSpec {
  std::string kind = "takagi";
  double a = 0.0;
  double q = 0.0;
  std::string g;
  std::vector<double> alphas;
  std::optional<std::size_t> max_level;

  static SchemeSpec parse(std::string_view text);
  // Accepts the string form or {"kind": ..., ...}.
  static SchemeSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string to_string() const;
  CoefficientScheme build() const;

  bool operator==(const SchemeSpec&) const = default;
};

// classic | random:seed=N | rule:NAME
SignField parse_signs(std::string_view text);

// power:p=P | phi:q=Q,g=EXPR
Gauge parse_gauge(std::string_view text);

Mode parse_mode(std::string_view text);

// "8", "6,8,10", "6:14" or "6:14:2".
std::vector<std::size_t> parse_levels(std::string_view text);

}  // namespace phivar::cli
