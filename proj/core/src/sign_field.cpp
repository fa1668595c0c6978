#include "phivar/sign_field.hpp"

#include <bit>

#include "phivar/error.hpp"

namespace phivar {

SignField SignField::classic() { return SignField{}; }

SignField SignField::random(std::uint64_t seed) {
  SignField s;
  s.kind_ = SignKind::random;
  s.seed_ = seed;
  return s;
}

SignField SignField::rule(std::string name, Rule predicate) {
  if (!predicate) throw InvalidArgument("sign rule: empty predicate");
  SignField s;
  s.kind_ = SignKind::rule;
  s.name_ = std::move(name);
  s.rule_ = std::make_shared<const Rule>(std::move(predicate));
  return s;
}

SignField SignField::named_rule(const std::string& name) {
  if (name == "alternate-cell") {
    return rule(name, [](std::size_t, std::uint64_t k) { return (k & 1U) == 1U; });
  }
  if (name == "alternate-level") {
    return rule(name, [](std::size_t m, std::uint64_t) { return (m & 1U) == 0U; });
  }
  if (name == "thue-morse") {
    return rule(name, [](std::size_t, std::uint64_t k) { return (std::popcount(k - 1) & 1) == 0; });
  }
  throw InvalidArgument("unknown sign rule '" + name +
                        "' (expected alternate-cell, alternate-level or thue-morse)");
}

std::string SignField::description() const {
  switch (kind_) {
    case SignKind::classic: return "classic";
    case SignKind::random: return "random:seed=" + std::to_string(seed_);
    case SignKind::rule: return "rule:" + name_;
  }
  return "classic";
}

}  // namespace phivar
