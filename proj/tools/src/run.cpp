#include "run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "phivar/conditions.hpp"
#include "phivar/dyadic.hpp"
#include "phivar/error.hpp"
#include "phivar/limits.hpp"
#include "phivar/parallel.hpp"
#include "phivar/path_io.hpp"
#include "phivar/variation.hpp"
#include "svg.hpp"

#ifndef PHIVAR_VERSION
#define PHIVAR_VERSION "0.0.0"
#endif

namespace phivar::cli {

using nlohmann::json;

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e)) return kExitConfig;
  if (dynamic_cast<const CapExceeded*>(&e)) return kExitCap;
  if (dynamic_cast<const GaugeDomainError*>(&e)) return kExitGaugeDomain;
  return kExitFailure;
}

json error_json(const std::exception& e) {
  json j;
  const auto* err = dynamic_cast<const Error*>(&e);
  j["error"] = err ? err->kind() : "internal";
  j["message"] = e.what();
  j["exit_code"] = exit_code_for(e);
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) j["violations"] = c->violations();
  return j;
}

unsigned resolve_cli_threads(std::optional<unsigned> requested) {
  if (requested) return *requested;
  if (const char* env = std::getenv("PHIVAR_THREADS"); env && *env) {
    try {
      const auto v = parse_unsigned(env, "PHIVAR_THREADS");
      if (v == 0 || v > 4096) throw InvalidArgument("PHIVAR_THREADS must lie in [1, 4096]");
      return static_cast<unsigned>(v);
    } catch (const InvalidArgument& e) {
      throw ConfigError({e.what()});
    }
  }
  return 0;
}

namespace {

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt(double v) { return format_double(v); }

std::string fmt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_file(const std::string& path, const std::string& content, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

struct Context {
  const RunConfig& config;
  unsigned threads;
  std::ostringstream csv;
  json results = json::array();
  json provenance;
  std::optional<Chart> chart;
  std::optional<std::string> binary;
};

void variation_study(Context& cx) {
  const auto& c = cx.config;
  const auto scheme = c.scheme.build();
  const auto signs = parse_signs(c.signs);
  const auto gauge = parse_gauge(c.gauge);
  const ModeSpec mode{parse_mode(c.mode), c.samples, c.seed};
  const auto study = convergence_study(scheme, signs, gauge, c.n, c.t, mode, cx.threads);

  cx.csv << "n,t,mode,value,stderr,limit,deviation\n";
  Series values{describe(gauge), {}, {}};
  std::optional<double> limit;
  if (study.limit) limit = study.limit->value;
  for (std::size_t i = 0; i < study.reports.size(); ++i) {
    const auto& r = study.reports[i];
    cx.csv << r.n << ',' << fmt(r.t) << ',' << to_string(r.mode) << ',' << fmt(r.value) << ',' << fmt(r.stderr_)
           << ',' << fmt(limit) << ',' << fmt(study.deviations[i]) << '\n';
    cx.results.push_back(json{{"n", r.n},
                              {"t", r.t},
                              {"mode", to_string(r.mode)},
                              {"value", r.value},
                              {"stderr", r.stderr_},
                              {"limit", opt(limit)},
                              {"limit_source", study.limit ? json(study.limit->source) : json(nullptr)},
                              {"deviation", opt(study.deviations[i])},
                              {"terms", r.terms},
                              {"samples", r.samples},
                              {"seed", r.seed ? json(*r.seed) : json(nullptr)},
                              {"seconds", r.seconds}});
    values.x.push_back(static_cast<double>(r.n));
    values.y.push_back(r.value);
  }
  Chart chart{"V_n over n: " + scheme.description(), "n", "V_n", {values}, std::nullopt, ""};
  if (study.limit) {
    chart.rule = study.limit->value;
    chart.rule_label = "limit " + fmt(study.limit->value);
  }
  cx.chart = chart;
}

EstimateMethod method_of(const RunConfig& c) {
  return c.method == "mc" ? EstimateMethod::mc(c.samples, c.seed) : EstimateMethod::exact(c.depth);
}

void interval_row(Context& cx, const IntervalEstimate& e, const json& extra = json::object()) {
  cx.csv << e.quantity << ',' << e.method << ',' << fmt(e.value) << ',' << fmt(e.low) << ',' << fmt(e.high) << ','
         << (e.seed ? std::to_string(*e.seed) : std::string()) << ',' << e.depth << '\n';
  json j{{"quantity", e.quantity}, {"method", e.method},   {"value", e.value},
         {"error_low", e.low},     {"error_high", e.high}, {"stderr", e.stderr_},
         {"seed", e.seed ? json(*e.seed) : json(nullptr)}, {"samples", e.samples},
         {"depth", e.depth}};
  j.update(extra);
  cx.results.push_back(j);
}

void limits(Context& cx) {
  const auto& c = cx.config;
  cx.csv << "quantity,method,value,error_low,error_high,seed,depth\n";
  if (c.quantity == "moment") {
    interval_row(cx, moment_Z({c.q, c.depth}, c.r, method_of(c), cx.threads), {{"q", c.q}, {"r", c.r}});
    return;
  }
  const auto scheme = c.scheme.build();
  if (c.quantity == "tv") {
    interval_row(cx, total_variation_expectation(scheme, method_of(c), cx.threads));
    return;
  }
  Series exact{"exact l2", {}, {}};
  for (std::size_t n : c.n) {
    const auto rep = c.method == "mc" ? coupling_distance_sampled(scheme, c.q, n, c.r, c.samples, c.seed, cx.threads)
                                      : coupling_distance(scheme, c.q, n);
    IntervalEstimate e;
    e.quantity = "coupling-l2";
    e.method = "closed-form";
    e.value = e.low = e.high = rep.exact_l2;
    e.depth = n;
    interval_row(cx, e, {{"n", n}, {"q", c.q}});
    if (rep.sampled) {
      IntervalEstimate s;
      s.quantity = "coupling-l" + fmt(rep.sampled->p);
      s.method = "mc";
      s.value = rep.sampled->value;
      s.stderr_ = rep.sampled->stderr_;
      s.low = s.value - kConfidenceWidth * s.stderr_;
      s.high = s.value + kConfidenceWidth * s.stderr_;
      s.seed = rep.sampled->seed;
      s.samples = rep.sampled->samples;
      s.depth = n;
      interval_row(cx, s, {{"n", n}, {"q", c.q}});
    }
    exact.x.push_back(static_cast<double>(n));
    exact.y.push_back(rep.exact_l2);
  }
  cx.chart = Chart{"Coupling distance: " + scheme.description(), "n", "||Z_n/s_n - Z||", {exact}, 0.0, "0"};
}

void clt(Context& cx) {
  const auto& c = cx.config;
  const auto scheme = c.scheme.build();
  cx.csv << "n,w1,method,samples,seed\n";
  Series w{"W1", {}, {}};
  for (std::size_t n : c.n) {
    const auto r = clt_distance(scheme, n, c.samples, c.seed, cx.threads);
    cx.csv << r.n << ',' << fmt(r.w1) << ',' << r.method << ',' << r.samples << ','
           << (r.seed ? std::to_string(*r.seed) : std::string()) << '\n';
    cx.results.push_back(json{{"n", r.n},
                              {"w1", r.w1},
                              {"method", r.method},
                              {"samples", r.samples},
                              {"seed", r.seed ? json(*r.seed) : json(nullptr)}});
    w.x.push_back(static_cast<double>(n));
    w.y.push_back(r.w1);
  }
  cx.chart = Chart{"W1 to N(0,1): " + scheme.description(), "n", "W1", {w}, 0.0, "0"};
}

json path_json(const DyadicPath& p) {
  return json{{"level", p.level},
              {"points", p.values.size()},
              {"scheme", p.scheme_id},
              {"signs", p.signs_id},
              {"seed", p.seed ? json(*p.seed) : json(nullptr)}};
}

Series path_series(const DyadicPath& p, std::string label) {
  Series s{std::move(label), {}, p.values};
  s.x.reserve(p.values.size());
  for (std::size_t k = 0; k < p.values.size(); ++k) s.x.push_back(std::ldexp(static_cast<double>(k), -int(p.level)));
  return s;
}

void path(Context& cx) {
  const auto& c = cx.config;
  const auto signs = parse_signs(c.signs);
  if (!c.preset) {
    const auto scheme = c.scheme.build();
    const auto p = gen_path(scheme, signs, c.level, c.tolerance);
    write_path_csv(cx.csv, p);
    cx.results.push_back(path_json(p));
    if (c.output.bin) {
      std::ostringstream bin;
      write_path_binary(bin, p);
      cx.binary = bin.str();
    }
    cx.chart = Chart{"X_t: " + scheme.description(), "t", "X_t", {path_series(p, "")}, std::nullopt, ""};
    return;
  }
  // figure1: prescribed-q(0.7, spow:rho) for rho in {-2, 0, 2}.
  std::vector<DyadicPath> paths;
  Chart chart{"X_t for q = 0.7, g = (1+x)^rho", "t", "X_t", {}, std::nullopt, ""};
  cx.csv << "t";
  for (double rho : {-2.0, 0.0, 2.0}) {
    const auto scheme = CoefficientScheme::prescribed_q(0.7, RegularlyVaryingFn::shifted_power(rho));
    paths.push_back(gen_path(scheme, signs, c.level, c.tolerance));
    cx.csv << ",rho=" << fmt(rho);
    cx.results.push_back(path_json(paths.back()));
    chart.series.push_back(path_series(paths.back(), "rho = " + fmt(rho)));
  }
  cx.csv << '\n';
  for (std::size_t k = 0; k < paths.front().values.size(); ++k) {
    cx.csv << fmt(std::ldexp(static_cast<double>(k), -int(c.level)));
    for (const auto& p : paths) cx.csv << ',' << fmt(p.values[k]);
    cx.csv << '\n';
  }
  cx.chart = chart;
}

void conditions(Context& cx) {
  const auto& c = cx.config;
  const auto scheme = c.scheme.build();
  ConditionInput in;
  in.q = c.q;
  in.b = c.b;
  if (c.L) in.L = parse_g(*c.L);
  if (c.ell) in.ell = parse_g(*c.ell);
  const auto rep = check_conditions(scheme, in, c.nmin, c.nmax);
  const auto crit = critical_exponents(scheme, c.nmin, c.nmax);

  cx.csv << "n,ratio_i,ratio_ii,ratio_iii,ratio_iv,successive\n";
  json rows = json::array();
  for (const auto& r : rep.rows) {
    cx.csv << r.n << ',' << fmt(r.ratio_i) << ',' << fmt(r.ratio_ii) << ',' << fmt(r.ratio_iii) << ','
           << fmt(r.ratio_iv) << ',' << fmt(r.successive) << '\n';
    rows.push_back(json{{"n", r.n},
                        {"ratio_i", opt(r.ratio_i)},
                        {"ratio_ii", opt(r.ratio_ii)},
                        {"ratio_iii", opt(r.ratio_iii)},
                        {"ratio_iv", opt(r.ratio_iv)},
                        {"successive", r.successive}});
  }
  static const char* const names[] = {"i", "ii", "iii", "iv"};
  json verdicts = json::object();
  for (int i = 0; i < 4; ++i) {
    const bool applies = !std::isnan(rep.targets[i]);
    cx.csv << "# verdict (" << names[i] << "): " << to_string(rep.verdicts[i]);
    if (applies) cx.csv << " target " << fmt(rep.targets[i]);
    cx.csv << '\n';
    verdicts[names[i]] = json{{"verdict", to_string(rep.verdicts[i])},
                              {"target", applies ? json(rep.targets[i]) : json(nullptr)}};
  }
  cx.csv << "# verdict (successive): " << to_string(rep.successive_verdict) << " estimate "
         << fmt(rep.successive_estimate) << " target " << fmt(rep.successive_target) << '\n';
  cx.results.push_back(json{
      {"rows", rows},
      {"verdicts", verdicts},
      {"successive", {{"estimate", rep.successive_estimate},
                      {"target", rep.successive_target},
                      {"verdict", to_string(rep.successive_verdict)}}},
      {"critical", {{"q_last", crit.q_last},
                    {"q_lower", crit.q_lower},
                    {"q_upper", crit.q_upper},
                    {"p_critical", opt(crit.p_critical)}}}});

  Series iv{"ratio", {}, {}};
  for (const auto& r : rep.rows) {
    const auto v = c.q == 0.0 ? r.ratio_ii : r.ratio_iv;
    if (!v) continue;
    iv.x.push_back(static_cast<double>(r.n));
    iv.y.push_back(*v);
  }
  const double target = c.q == 0.0 ? rep.targets[1] : rep.targets[3];
  cx.chart = Chart{"Condition ratio: " + scheme.description(), "n", c.q == 0.0 ? "s_n^2 / ell" : "s_n^2 / (2^{2qn} ell)",
                   {iv}, std::isnan(target) ? std::nullopt : std::optional<double>(target), "target"};
}

}  // namespace

Record run(const RunConfig& config, std::ostream& console) {
  validate(config);
  Context cx{config, resolve_cli_threads(config.threads), {}, json::array(), json::object(), std::nullopt,
             std::nullopt};
  cx.provenance["version"] = PHIVAR_VERSION;
  cx.provenance["threads"] = resolve_threads(cx.threads);
  if (!config.reproducible) {
    const auto ts = timestamp();
    cx.provenance["timestamp"] = ts;
    cx.csv << "# phivar " << PHIVAR_VERSION << ' ' << ts << '\n';
  }
  switch (config.command) {
    case Command::variation:
    case Command::study: variation_study(cx); break;
    case Command::limits: limits(cx); break;
    case Command::clt: clt(cx); break;
    case Command::path: path(cx); break;
    case Command::conditions: conditions(cx); break;
  }

  Record record{config, cx.results, cx.provenance};
  if (config.output.csv) {
    write_file(*config.output.csv, cx.csv.str());
  } else {
    console << cx.csv.str();
  }
  if (config.output.json) write_file(*config.output.json, to_json(record).dump(2) + "\n");
  if (config.output.svg && cx.chart) {
    std::ostringstream svg;
    write_svg(svg, *cx.chart);
    write_file(*config.output.svg, svg.str());
  }
  if (config.output.bin && cx.binary) write_file(*config.output.bin, *cx.binary, true);
  return record;
}

}  // namespace phivar::cli
