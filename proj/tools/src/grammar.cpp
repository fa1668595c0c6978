#include "grammar.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "phivar/error.hpp"
#include "phivar/path_io.hpp"

namespace phivar::cli {

namespace {

[[noreturn]] void fail(const std::string& message) { throw InvalidArgument(message); }

std::string quote_text(std::string_view s) { return "'" + std::string(s) + "'"; }

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

// "key=value" pairs at the top level of `body`.
struct KeyValues {
  std::vector<std::pair<std::string_view, std::string_view>> items;

  std::optional<std::string_view> take(std::string_view key) {
    for (auto it = items.begin(); it != items.end(); ++it) {
      if (it->first == key) {
        const auto v = it->second;
        items.erase(it);
        return v;
      }
    }
    return std::nullopt;
  }

  void expect_empty(std::string_view context) const {
    if (!items.empty()) fail(std::string(context) + ": unknown key " + quote_text(items.front().first));
  }
};

KeyValues key_values(std::string_view body, std::string_view context) {
  KeyValues kv;
  if (body.empty()) return kv;
  for (auto part : split_top_level(body)) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) fail(std::string(context) + ": expected key=value, got " + quote_text(part));
    kv.items.emplace_back(part.substr(0, eq), part.substr(eq + 1));
  }
  return kv;
}

// Contents of "name(...)" if `text` has that shape.
std::optional<std::string_view> call_body(std::string_view text, std::string_view name) {
  if (!starts_with(text, name) || text.size() < name.size() + 2) return std::nullopt;
  if (text[name.size()] != '(' || text.back() != ')') return std::nullopt;
  return text.substr(name.size() + 1, text.size() - name.size() - 2);
}

}  // namespace

double parse_number(std::string_view text, std::string_view what) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    fail(std::string(what) + ": expected a finite number, got " + quote_text(text));
  }
  return value;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    fail(std::string(what) + ": expected a nonnegative integer, got " + quote_text(text));
  }
  return value;
}

std::vector<std::string_view> split_top_level(std::string_view text) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')' && --depth < 0) fail("unbalanced parentheses in " + quote_text(text));
    if (text[i] == ',' && depth == 0) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (depth != 0) fail("unbalanced parentheses in " + quote_text(text));
  parts.push_back(text.substr(start));
  return parts;
}

RegularlyVaryingFn parse_g(std::string_view text) {
  if (starts_with(text, "const:")) return RegularlyVaryingFn::constant(parse_number(text.substr(6), "const"));
  if (starts_with(text, "spow:")) return RegularlyVaryingFn::shifted_power(parse_number(text.substr(5), "spow"));
  if (starts_with(text, "logpow:")) return RegularlyVaryingFn::log_power(parse_number(text.substr(7), "logpow"));
  if (starts_with(text, "pow:")) {
    const auto body = text.substr(4);
    const auto at = body.find('@');
    if (at == std::string_view::npos) return RegularlyVaryingFn::power(parse_number(body, "pow"));
    return RegularlyVaryingFn::power(parse_number(body.substr(0, at), "pow"),
                                     parse_number(body.substr(at + 1), "pow clamp"));
  }
  if (auto body = call_body(text, "mul")) {
    RegularlyVaryingFn out;
    for (auto part : split_top_level(*body)) out = out * parse_g(part);
    return out;
  }
  if (auto body = call_body(text, "table")) {
    std::vector<double> xs, ys;
    for (auto part : split_top_level(*body)) {
      const auto colon = part.find(':');
      if (colon == std::string_view::npos) fail("table: expected X:Y, got " + quote_text(part));
      xs.push_back(parse_number(part.substr(0, colon), "table x"));
      ys.push_back(parse_number(part.substr(colon + 1), "table y"));
    }
    return RegularlyVaryingFn::tabulated(std::move(xs), std::move(ys));
  }
  if (auto body = call_body(text, "ell")) {
    auto kv = key_values(*body, "ell");
    const auto b = kv.take("b");
    const auto L = kv.take("L");
    kv.expect_empty("ell");
    if (!b || !L) fail("ell: needs b=B and L=EXPR");
    return build_ell(parse_g(*L), parse_number(*b, "ell b"));
  }
  fail("unknown g-expression " + quote_text(text) +
       " (expected const:, pow:, spow:, logpow:, table(), ell() or mul())");
}

SchemeSpec SchemeSpec::parse(std::string_view text) {
  SchemeSpec s;
  const auto colon = text.find(':');
  s.kind = std::string(text.substr(0, colon));
  const auto body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const std::string context = "scheme " + s.kind;
  if (s.kind == "explicit") {
    if (body.empty()) fail("scheme explicit: needs at least one coefficient");
    for (auto part : split_top_level(body)) s.alphas.push_back(parse_number(part, "explicit coefficient"));
    return s;
  }
  auto kv = key_values(body, context);
  if (auto m = kv.take("max")) s.max_level = parse_unsigned(*m, "max");
  if (s.kind == "takagi" || s.kind == "faber") {
    // no parameters
  } else if (s.kind == "geometric") {
    const auto a = kv.take("a");
    if (!a) fail("scheme geometric: needs a=A");
    s.a = parse_number(*a, "geometric a");
  } else if (s.kind == "prescribed-q" || s.kind == "prescribed-q0") {
    if (s.kind == "prescribed-q") {
      const auto q = kv.take("q");
      if (!q) fail("scheme prescribed-q: needs q=Q");
      s.q = parse_number(*q, "prescribed-q q");
    }
    const auto g = kv.take("g");
    if (!g) fail(context + ": needs g=EXPR");
    s.g = std::string(*g);
    parse_g(s.g);
  } else {
    fail("unknown scheme kind " + quote_text(s.kind) +
         " (expected takagi, geometric, explicit, faber, prescribed-q or prescribed-q0)");
  }
  kv.expect_empty(context);
  return s;
}

SchemeSpec SchemeSpec::from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse(j.get<std::string>());
  if (!j.is_object()) fail("scheme: expected a string or an object");
  if (!j.contains("kind") || !j["kind"].is_string()) fail("scheme: missing string field 'kind'");
  SchemeSpec s;
  s.kind = j["kind"].get<std::string>();
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) fail("scheme " + s.kind + ": missing number field '" + key + "'");
    return j[key].get<double>();
  };
  auto known = std::vector<std::string>{"kind", "max"};
  if (j.contains("max")) {
    if (!j["max"].is_number_unsigned()) fail("scheme: 'max' must be a nonnegative integer");
    s.max_level = j["max"].get<std::size_t>();
  }
  if (s.kind == "geometric") {
    s.a = number("a");
    known.push_back("a");
  } else if (s.kind == "explicit") {
    if (!j.contains("alphas") || !j["alphas"].is_array()) fail("scheme explicit: missing array 'alphas'");
    for (const auto& v : j["alphas"]) {
      if (!v.is_number()) fail("scheme explicit: 'alphas' must hold numbers");
      s.alphas.push_back(v.get<double>());
    }
    if (s.alphas.empty()) fail("scheme explicit: needs at least one coefficient");
    known.push_back("alphas");
  } else if (s.kind == "prescribed-q" || s.kind == "prescribed-q0") {
    if (s.kind == "prescribed-q") {
      s.q = number("q");
      known.push_back("q");
    }
    if (!j.contains("g") || !j["g"].is_string()) fail("scheme " + s.kind + ": missing string field 'g'");
    s.g = j["g"].get<std::string>();
    parse_g(s.g);
    known.push_back("g");
  } else if (s.kind != "takagi" && s.kind != "faber") {
    fail("unknown scheme kind " + quote_text(s.kind));
  }
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail("scheme " + s.kind + ": unknown field '" + key + "'");
    }
  }
  return s;
}

nlohmann::json SchemeSpec::to_json() const {
  nlohmann::json j{{"kind", kind}};
  if (kind == "geometric") j["a"] = a;
  if (kind == "explicit") j["alphas"] = alphas;
  if (kind == "prescribed-q") j["q"] = q;
  if (kind == "prescribed-q" || kind == "prescribed-q0") j["g"] = g;
  if (max_level) j["max"] = *max_level;
  return j;
}

std::string SchemeSpec::to_string() const {
  std::string out = kind;
  std::vector<std::string> parts;
  if (kind == "explicit") {
    for (double v : alphas) parts.push_back(format_double(v));
  }
  if (kind == "geometric") parts.push_back("a=" + format_double(a));
  if (kind == "prescribed-q") parts.push_back("q=" + format_double(q));
  if (kind == "prescribed-q" || kind == "prescribed-q0") parts.push_back("g=" + g);
  if (max_level) parts.push_back("max=" + std::to_string(*max_level));
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : ":") + parts[i];
  return out;
}

CoefficientScheme SchemeSpec::build() const {
  if (kind == "takagi") return CoefficientScheme::takagi(max_level.value_or(CoefficientScheme::kDefaultMaxLevel));
  if (kind == "geometric") {
    return CoefficientScheme::geometric(a, max_level.value_or(CoefficientScheme::kDefaultMaxLevel));
  }
  if (kind == "explicit") return CoefficientScheme::explicit_list(alphas);
  if (kind == "faber") return CoefficientScheme::faber(max_level.value_or(CoefficientScheme::kDefaultFaberLevel));
  if (kind == "prescribed-q") {
    return CoefficientScheme::prescribed_q(q, parse_g(g), max_level.value_or(CoefficientScheme::kDefaultMaxLevel));
  }
  if (kind == "prescribed-q0") {
    return CoefficientScheme::prescribed_q0(parse_g(g), max_level.value_or(CoefficientScheme::kDefaultMaxLevel));
  }
  fail("unknown scheme kind " + quote_text(kind));
}

SignField parse_signs(std::string_view text) {
  if (text == "classic") return SignField::classic();
  if (starts_with(text, "random:")) {
    auto kv = key_values(text.substr(7), "signs random");
    const auto seed = kv.take("seed");
    kv.expect_empty("signs random");
    if (!seed) fail("signs random: needs seed=N");
    return SignField::random(parse_unsigned(*seed, "signs seed"));
  }
  if (starts_with(text, "rule:")) return SignField::named_rule(std::string(text.substr(5)));
  fail("unknown sign field " + quote_text(text) + " (expected classic, random:seed=N or rule:NAME)");
}

Gauge parse_gauge(std::string_view text) {
  if (starts_with(text, "power:")) {
    auto kv = key_values(text.substr(6), "gauge power");
    const auto p = kv.take("p");
    kv.expect_empty("gauge power");
    if (!p) fail("gauge power: needs p=P");
    const double value = parse_number(*p, "gauge p");
    if (!(value > 0.0)) fail("gauge power: p must be > 0");
    return PowerGauge{value};
  }
  if (starts_with(text, "phi:")) {
    auto kv = key_values(text.substr(4), "gauge phi");
    const auto q = kv.take("q");
    const auto g = kv.take("g");
    kv.expect_empty("gauge phi");
    if (!q || !g) fail("gauge phi: needs q=Q and g=EXPR");
    return PhiFunction(parse_number(*q, "gauge q"), parse_g(*g));
  }
  fail("unknown gauge " + quote_text(text) + " (expected power:p=P or phi:q=Q,g=EXPR)");
}

Mode parse_mode(std::string_view text) {
  if (text == "enumerate") return Mode::enumerate;
  if (text == "binomial") return Mode::binomial;
  if (text == "mc") return Mode::mc;
  fail("unknown mode " + quote_text(text) + " (expected enumerate, binomial or mc)");
}

std::vector<std::size_t> parse_levels(std::string_view text) {
  std::vector<std::size_t> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::uint64_t> v;
    std::size_t start = 0;
    while (true) {
      const auto colon = text.find(':', start);
      v.push_back(parse_unsigned(text.substr(start, colon - start), "levels"));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (v.size() > 3) fail("levels: expected FIRST:LAST[:STEP], got " + quote_text(text));
    const std::uint64_t step = v.size() == 3 ? v[2] : 1;
    if (step == 0 || v[1] < v[0]) fail("levels: empty range " + quote_text(text));
    for (std::uint64_t n = v[0]; n <= v[1]; n += step) out.push_back(n);
    return out;
  }
  for (auto part : split_top_level(text)) out.push_back(parse_unsigned(part, "levels"));
  return out;
}

}  // namespace phivar::cli
