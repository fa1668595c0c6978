#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grammar.hpp"

namespace phivar::cli {

inline constexpr const char* kSchemaVersion = "phivar/1";

enum class Command { variation, study, limits, clt, path, conditions };

std::string to_string(Command c);
std::optional<Command> parse_command(std::string_view text);

struct Outputs {
  std::optional<std::string> csv;
  std::optional<std::string> json;
  std::optional<std::string> svg;
  std::optional<std::string> bin;  // path command only

  bool operator==(const Outputs&) const = default;
};

struct RunConfig {
  Command command = Command::variation;
  SchemeSpec scheme;
  std::string signs = "classic";
  std::string gauge = "power:p=2";
  std::vector<std::size_t> n;
  double t = 1.0;
  std::string mode = "enumerate";
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
  std::optional<unsigned> threads;
  // limits: moment | coupling | tv
  std::string quantity = "moment";
  double q = 0.5;
  double r = 2.0;
  std::size_t depth = 20;
  std::string method = "exact";  // exact | mc
  // conditions
  double b = 2.0;
  std::optional<std::string> L;
  std::optional<std::string> ell;
  std::size_t nmin = 1;
  std::size_t nmax = 60;
  // path
  std::size_t level = 10;
  double tolerance = 1e-12;
  std::optional<std::string> preset;
  Outputs output;
  bool reproducible = false;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);

// Parse-then-validate: collects every violation and throws a single
// ConfigError listing them all.
RunConfig config_from_json(const nlohmann::json& j);

// Checks cross-field constraints and that every spec string parses.
void validate(const RunConfig& config);

// A configuration together with the results it produced, as written to the
// JSON artifact.
struct Record {
  RunConfig config;
  nlohmann::json results;
  nlohmann::json provenance;

  bool operator==(const Record&) const = default;
};

nlohmann::json to_json(const Record& record);
Record record_from_json(const nlohmann::json& j);

}  // namespace phivar::cli
