#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

namespace phivar {

enum class SignKind { classic, rule, random };

// Signs sigma_m on the level-m dyadic cells [(k-1) 2^{-m}, k 2^{-m}),
// k = 1..2^m. Random fields hash (seed, m, k) with a counter-based mixer, so
// any sign is available in O(1) without materializing a level. Cell indices
// are taken modulo 2^64 at levels m >= 64.
class SignField {
 public:
  // Predicate for rule fields: true means +1.
  using Rule = std::function<bool(std::size_t m, std::uint64_t k)>;

  static SignField classic();
  static SignField random(std::uint64_t seed);
  // A user-supplied rule; `name` is used in descriptions only.
  static SignField rule(std::string name, Rule predicate);
  // Built-in rules:
  //   alternate-cell  +1 on odd cells, -1 on even cells
  //   alternate-level +1 on even levels, -1 on odd levels
  //   thue-morse      +1 when popcount(k - 1) is even
  // Throws InvalidArgument for unknown names.
  static SignField named_rule(const std::string& name);

  SignKind kind() const noexcept { return kind_; }
  bool is_classic() const noexcept { return kind_ == SignKind::classic; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& rule_name() const noexcept { return name_; }

  // +1 or -1.
  int sign(std::size_t m, std::uint64_t k) const {
    switch (kind_) {
      case SignKind::classic: return 1;
      case SignKind::random: return random_sign(seed_, m, k);
      case SignKind::rule: return (*rule_)(m, k) ? 1 : -1;
    }
    return 1;
  }

  // "classic", "random:seed=42", "rule:thue-morse".
  std::string description() const;

  static int random_sign(std::uint64_t seed, std::size_t m, std::uint64_t k) noexcept {
    std::uint64_t h = mix(seed ^ mix(0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(m) + 1)));
    h = mix(h ^ k);
    return (h >> 63) ? -1 : 1;
  }

  // splitmix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  SignKind kind_ = SignKind::classic;
  std::uint64_t seed_ = 0;
  std::string name_;
  std::shared_ptr<const Rule> rule_;
};

}  // namespace phivar
