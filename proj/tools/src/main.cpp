#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "phivar/error.hpp"
#include "run.hpp"

using nlohmann::json;
using namespace phivar::cli;

namespace {

const char* const kGrammar = R"(Specs:
  scheme   takagi[:max=N] | geometric:a=A[,max=N] | explicit:A0,A1,...
           faber[:max=N] | prescribed-q:q=Q,g=EXPR[,max=N] | prescribed-q0:g=EXPR[,max=N]
  g        const:C | pow:RHO[@CLAMP] | spow:RHO | logpow:KAPPA
           table(X:Y,...) | ell(b=B,L=EXPR) | mul(EXPR,EXPR,...)
           pow is max(x,CLAMP)^RHO, spow is (1+x)^RHO, logpow is log(e+x)^KAPPA
  gauge    power:p=P | phi:q=Q,g=EXPR
  signs    classic | random:seed=N | rule:alternate-cell|alternate-level|thue-morse
  levels   N | N1,N2,... | FIRST:LAST[:STEP]

Config files (--config) hold a JSON object with "schema":"phivar/1" and the
same fields as the flags; flags given on the command line take precedence.
PHIVAR_THREADS sets the worker count when --threads is absent.

Exit codes: 0 ok, 1 failure, 2 invalid configuration, 3 cap exceeded,
4 gauge domain violation. Errors are printed to stderr as JSON.)";

struct Flags {
  std::string config_path;
  std::string scheme, signs, gauge, n, mode, quantity, method, L, ell, preset;
  std::string csv, json_path, svg, bin;
  double t = 0, q = 0, r = 0, b = 0, tolerance = 0;
  std::uint64_t samples = 0, seed = 0, depth = 0, nmin = 0, nmax = 0, level = 0;
  unsigned threads = 0;
  bool reproducible = false;
};

struct Bound {
  CLI::App* app;
  std::vector<std::pair<CLI::Option*, std::function<void(json&)>>> options;

  template <class T>
  void add(const std::string& flag, const std::string& key, T& target, const std::string& help) {
    auto* opt = app->add_option(flag, target, help);
    options.emplace_back(opt, [key, &target](json& j) { j[key] = target; });
  }

  void output(const std::string& flag, const std::string& key, std::string& target, const std::string& help) {
    auto* opt = app->add_option(flag, target, help);
    options.emplace_back(opt, [key, &target](json& j) { j["output"][key] = target; });
  }
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw phivar::ConfigError({"cannot read config file '" + path + "'"});
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw phivar::ConfigError({"config file '" + path + "' is not valid JSON: " + e.what()});
  }
}

int fail(const std::exception& e) {
  std::cerr << error_json(e).dump() << '\n';
  return exit_code_for(e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phivar: Phi-variation of Takagi-class functions along dyadic partitions"};
  app.footer(kGrammar);
  app.set_version_flag("--version", PHIVAR_VERSION);
  app.require_subcommand(1);

  Flags f;
  std::vector<Bound> bound;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"variation", "Phi-variation V_{n,t} at the given level(s)"},
      {"study", "V_{n,t} over a list of levels against the theoretical limit"},
      {"limits", "Moments of the limit law, coupling distance, expected total variation"},
      {"clt", "W1 distance of the normalized increment law to N(0,1)"},
      {"path", "Sample path on the level-N dyadic grid"},
      {"conditions", "Regular-variation conditions and critical exponents"}};

  for (const auto& [name, help] : commands) {
    Bound b{app.add_subcommand(name, help), {}};
    auto* sub = b.app;
    sub->add_option("--config", f.config_path, "JSON config file (schema phivar/1)");
    b.add("--scheme", "scheme", f.scheme, "Coefficient scheme");
    b.add("--signs", "signs", f.signs, "Sign field (default classic)");
    b.add("--threads", "threads", f.threads, "Worker threads (default: PHIVAR_THREADS or all cores)");
    b.output("--csv", "csv", f.csv, "CSV output path (default stdout)");
    b.output("--json", "json", f.json_path, "JSON record output path");
    b.output("--svg", "svg", f.svg, "SVG chart output path");
    auto* repro = sub->add_flag("--reproducible", f.reproducible, "Omit the timestamp header and field");
    b.options.emplace_back(repro, [&f](json& j) { j["reproducible"] = f.reproducible; });
    if (name == "variation" || name == "study") {
      b.add("--gauge", "gauge", f.gauge, "Gauge (default power:p=2)");
      b.add("--n", "n", f.n, "Level(s)");
      b.add("--t", "t", f.t, "Time in [0, 1] (default 1)");
      b.add("--mode", "mode", f.mode, "enumerate | binomial | mc");
      b.add("--samples", "samples", f.samples, "Monte Carlo samples (default 1000000)");
      b.add("--seed", "seed", f.seed, "Monte Carlo seed (default 0)");
    }
    if (name == "limits") {
      b.add("--quantity", "quantity", f.quantity, "moment | coupling | tv");
      b.add("--q", "q", f.q, "Exponent q in (0, 1) of the limit law");
      b.add("--r", "r", f.r, "Moment order r >= 1, or p of the sampled coupling norm");
      b.add("--depth", "depth", f.depth, "Enumeration depth (default 20)");
      b.add("--method", "method", f.method, "exact | mc");
      b.add("--n", "n", f.n, "Level(s) for the coupling distance");
      b.add("--samples", "samples", f.samples, "Monte Carlo samples");
      b.add("--seed", "seed", f.seed, "Monte Carlo seed");
    }
    if (name == "clt") {
      b.add("--n", "n", f.n, "Level(s)");
      b.add("--samples", "samples", f.samples, "Samples when the law is not binomial");
      b.add("--seed", "seed", f.seed, "Monte Carlo seed");
    }
    if (name == "path") {
      b.add("--level", "level", f.level, "Grid level N (2^N + 1 points, N <= 26)");
      b.add("--tolerance", "tolerance", f.tolerance, "Evaluation tolerance (default 1e-12)");
      b.add("--preset", "preset", f.preset, "figure1: q = 0.7, g = spow:rho for rho in {-2, 0, 2}");
      b.output("--bin", "bin", f.bin, "Binary path output (PHIVPATH format)");
    }
    if (name == "conditions") {
      b.add("--q", "q", f.q, "Growth exponent q >= 0");
      b.add("--b", "b", f.b, "Base b > 1 (default 2)");
      b.add("--L", "L", f.L, "L as a g-expression (conditions (i), (ii))");
      b.add("--ell", "ell", f.ell, "ell as a g-expression (default: built from L)");
      b.add("--nmin", "nmin", f.nmin, "First level (default 1)");
      b.add("--nmax", "nmax", f.nmax, "Last level (default 60)");
    }
    bound.push_back(std::move(b));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(phivar::ConfigError({e.what()}));
  }

  try {
    for (const auto& b : bound) {
      if (!b.app->parsed()) continue;
      json j = f.config_path.empty() ? json::object() : load_config(f.config_path);
      if (!j.is_object()) throw phivar::ConfigError({"config file must hold a JSON object"});
      if (j.contains("command") && j["command"] != b.app->get_name()) {
        throw phivar::ConfigError({"config file is for command '" + j["command"].dump() + "', not '" +
                                   b.app->get_name() + "'"});
      }
      j["command"] = b.app->get_name();
      if (!j.contains("output") || !j["output"].is_object()) j["output"] = json::object();
      for (const auto& [opt, apply] : b.options) {
        if (opt->count() > 0) apply(j);
      }
      const auto config = config_from_json(j);
      run(config, std::cout);
    }
  } catch (const std::exception& e) {
    return fail(e);
  }
  return kExitOk;
}
