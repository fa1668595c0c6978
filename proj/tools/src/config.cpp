#include "config.hpp"

#include <algorithm>
#include <functional>

#include "phivar/error.hpp"

namespace phivar::cli {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::variation: return "variation";
    case Command::study: return "study";
    case Command::limits: return "limits";
    case Command::clt: return "clt";
    case Command::path: return "path";
    case Command::conditions: return "conditions";
  }
  return "variation";
}

std::optional<Command> parse_command(std::string_view text) {
  for (auto c : {Command::variation, Command::study, Command::limits, Command::clt, Command::path,
                 Command::conditions}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

json to_json(const RunConfig& c) {
  json j;
  j["schema"] = kSchemaVersion;
  j["command"] = to_string(c.command);
  j["scheme"] = c.scheme.to_json();
  j["signs"] = c.signs;
  j["gauge"] = c.gauge;
  j["n"] = c.n;
  j["t"] = c.t;
  j["mode"] = c.mode;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["threads"] = c.threads ? json(*c.threads) : json(nullptr);
  j["quantity"] = c.quantity;
  j["q"] = c.q;
  j["r"] = c.r;
  j["depth"] = c.depth;
  j["method"] = c.method;
  j["b"] = c.b;
  j["L"] = c.L ? json(*c.L) : json(nullptr);
  j["ell"] = c.ell ? json(*c.ell) : json(nullptr);
  j["nmin"] = c.nmin;
  j["nmax"] = c.nmax;
  j["level"] = c.level;
  j["tolerance"] = c.tolerance;
  j["preset"] = c.preset ? json(*c.preset) : json(nullptr);
  json out = json::object();
  if (c.output.csv) out["csv"] = *c.output.csv;
  if (c.output.json) out["json"] = *c.output.json;
  if (c.output.svg) out["svg"] = *c.output.svg;
  if (c.output.bin) out["bin"] = *c.output.bin;
  j["output"] = out;
  j["reproducible"] = c.reproducible;
  return j;
}

namespace {

class Reader {
 public:
  explicit Reader(const json& j) : j_(j) {}

  std::vector<std::string> errors;

  bool has(const char* key) const { return j_.contains(key) && !j_[key].is_null(); }

  void string(const char* key, std::string& out) {
    if (!has(key)) return;
    if (j_[key].is_string()) {
      out = j_[key].get<std::string>();
    } else {
      errors.push_back(std::string("'") + key + "' must be a string");
    }
  }

  void string(const char* key, std::optional<std::string>& out) {
    if (!has(key)) return;
    std::string s;
    string(key, s);
    out = s;
  }

  void number(const char* key, double& out) {
    if (!has(key)) return;
    if (j_[key].is_number()) {
      out = j_[key].get<double>();
    } else {
      errors.push_back(std::string("'") + key + "' must be a number");
    }
  }

  template <class T>
  void unsigned_int(const char* key, T& out) {
    if (!has(key)) return;
    if (j_[key].is_number_unsigned()) {
      out = j_[key].get<T>();
    } else {
      errors.push_back(std::string("'") + key + "' must be a nonnegative integer");
    }
  }

  void boolean(const char* key, bool& out) {
    if (!has(key)) return;
    if (j_[key].is_boolean()) {
      out = j_[key].get<bool>();
    } else {
      errors.push_back(std::string("'") + key + "' must be true or false");
    }
  }

  // Runs a parser that throws phivar::Error and records its message.
  void guard(const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
  }

 private:
  const json& j_;
};

const std::vector<std::string> kKnownKeys{
    "schema", "command", "scheme", "signs", "gauge",  "n",     "t",    "mode",     "samples",
    "seed",   "threads", "quantity", "q",   "r",      "depth", "method", "b",      "L",
    "ell",    "nmin",    "nmax",   "level", "tolerance", "preset", "output", "reproducible"};

void check_spec_strings(const RunConfig& c, std::vector<std::string>& errors) {
  auto guard = [&](const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
  };
  guard([&] { (void)c.scheme.build(); });
  guard([&] { (void)parse_signs(c.signs); });
  guard([&] { (void)parse_gauge(c.gauge); });
  guard([&] { (void)parse_mode(c.mode); });
  if (c.L) guard([&] { (void)parse_g(*c.L); });
  if (c.ell) guard([&] { (void)parse_g(*c.ell); });
}

void check_ranges(const RunConfig& c, std::vector<std::string>& errors) {
  const bool needs_n = c.command == Command::variation || c.command == Command::study ||
                       c.command == Command::clt ||
                       (c.command == Command::limits && c.quantity == "coupling");
  if (needs_n && c.n.empty()) errors.push_back("'n' must list at least one level");
  if (!(c.t >= 0.0 && c.t <= 1.0)) errors.push_back("'t' must lie in [0, 1]");
  if (c.samples == 0) errors.push_back("'samples' must be positive");
  if (c.threads && *c.threads == 0) errors.push_back("'threads' must be positive");
  if (c.quantity != "moment" && c.quantity != "coupling" && c.quantity != "tv") {
    errors.push_back("'quantity' must be moment, coupling or tv");
  }
  if (c.method != "exact" && c.method != "mc") errors.push_back("'method' must be exact or mc");
  if (c.command == Command::limits && c.quantity != "tv" && !(c.q > 0.0 && c.q < 1.0)) {
    errors.push_back("'q' must lie in (0, 1)");
  }
  if (c.command == Command::conditions && !(c.q >= 0.0)) errors.push_back("'q' must be >= 0");
  if (!(c.r >= 1.0)) errors.push_back("'r' must be >= 1");
  if (c.depth == 0) errors.push_back("'depth' must be positive");
  if (!(c.b > 1.0)) errors.push_back("'b' must be > 1");
  if (c.nmin == 0 || c.nmax < c.nmin) errors.push_back("need 1 <= 'nmin' <= 'nmax'");
  if (c.command == Command::conditions && !c.L && !c.ell) errors.push_back("conditions need 'L' or 'ell'");
  if (c.level == 0) errors.push_back("'level' must be positive");
  if (!(c.tolerance > 0.0)) errors.push_back("'tolerance' must be > 0");
  if (c.preset && *c.preset != "figure1") errors.push_back("unknown preset '" + *c.preset + "'");
  if (c.preset && c.command != Command::path) errors.push_back("presets apply to the path command only");
  if (c.output.bin && c.command != Command::path) errors.push_back("'output.bin' applies to the path command only");
  if (c.output.bin && c.preset) errors.push_back("'output.bin' holds a single path and cannot be used with a preset");
}

}  // namespace

void validate(const RunConfig& c) {
  std::vector<std::string> errors;
  check_spec_strings(c, errors);
  check_ranges(c, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError({"config must be a JSON object"});
  RunConfig c;
  Reader rd(j);
  for (const auto& [key, _] : j.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
      rd.errors.push_back("unknown field '" + key + "'");
    }
  }
  if (rd.has("schema") && j["schema"] != kSchemaVersion) {
    rd.errors.push_back(std::string("'schema' must be \"") + kSchemaVersion + "\"");
  }
  if (!rd.has("command") || !j["command"].is_string()) {
    rd.errors.push_back("'command' is required");
  } else if (auto cmd = parse_command(j["command"].get<std::string>())) {
    c.command = *cmd;
  } else {
    rd.errors.push_back("unknown command '" + j["command"].get<std::string>() +
                        "' (expected variation, study, limits, clt, path or conditions)");
  }
  if (rd.has("scheme")) rd.guard([&] { c.scheme = SchemeSpec::from_json(j["scheme"]); });
  rd.string("signs", c.signs);
  rd.string("gauge", c.gauge);
  if (rd.has("n")) {
    const auto& n = j["n"];
    if (n.is_number_unsigned()) {
      c.n = {n.get<std::size_t>()};
    } else if (n.is_string()) {
      rd.guard([&] { c.n = parse_levels(n.get<std::string>()); });
    } else if (n.is_array() && std::all_of(n.begin(), n.end(), [](const json& v) { return v.is_number_unsigned(); })) {
      c.n = n.get<std::vector<std::size_t>>();
    } else {
      rd.errors.push_back("'n' must be a level, a list of levels or a range string");
    }
  }
  rd.number("t", c.t);
  rd.string("mode", c.mode);
  rd.unsigned_int("samples", c.samples);
  rd.unsigned_int("seed", c.seed);
  if (rd.has("threads")) {
    unsigned th = 0;
    rd.unsigned_int("threads", th);
    c.threads = th;
  }
  rd.string("quantity", c.quantity);
  rd.number("q", c.q);
  rd.number("r", c.r);
  rd.unsigned_int("depth", c.depth);
  rd.string("method", c.method);
  rd.number("b", c.b);
  rd.string("L", c.L);
  rd.string("ell", c.ell);
  rd.unsigned_int("nmin", c.nmin);
  rd.unsigned_int("nmax", c.nmax);
  rd.unsigned_int("level", c.level);
  rd.number("tolerance", c.tolerance);
  rd.string("preset", c.preset);
  rd.boolean("reproducible", c.reproducible);
  if (rd.has("output")) {
    const auto& o = j["output"];
    if (!o.is_object()) {
      rd.errors.push_back("'output' must be an object");
    } else {
      Reader out(o);
      for (const auto& [key, _] : o.items()) {
        if (key != "csv" && key != "json" && key != "svg" && key != "bin") {
          out.errors.push_back("unknown field 'output." + key + "'");
        }
      }
      out.string("csv", c.output.csv);
      out.string("json", c.output.json);
      out.string("svg", c.output.svg);
      out.string("bin", c.output.bin);
      rd.errors.insert(rd.errors.end(), out.errors.begin(), out.errors.end());
    }
  }
  check_spec_strings(c, rd.errors);
  check_ranges(c, rd.errors);
  if (!rd.errors.empty()) throw ConfigError(std::move(rd.errors));
  return c;
}

json to_json(const Record& r) {
  return json{{"schema", kSchemaVersion},
              {"config", to_json(r.config)},
              {"results", r.results},
              {"provenance", r.provenance}};
}

Record record_from_json(const json& j) {
  if (!j.is_object() || !j.contains("config")) throw ConfigError({"record must hold a 'config' object"});
  if (j.value("schema", std::string()) != kSchemaVersion) {
    throw ConfigError({std::string("record 'schema' must be \"") + kSchemaVersion + "\""});
  }
  Record r;
  r.config = config_from_json(j["config"]);
  r.results = j.value("results", json::array());
  r.provenance = j.value("provenance", json::object());
  return r;
}

}  // namespace phivar::cli
