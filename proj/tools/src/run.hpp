#pragma once

#include <exception>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "config.hpp"

namespace phivar::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCap = 3;
inline constexpr int kExitGaugeDomain = 4;

int exit_code_for(const std::exception& e) noexcept;

// {"error": kind, "message": ..., "exit_code": ..., ["violations": [...]]}
nlohmann::json error_json(const std::exception& e);

// Explicit request, else PHIVAR_THREADS, else 0 (all hardware threads).
unsigned resolve_cli_threads(std::optional<unsigned> requested);

// Runs a validated configuration. CSV goes to config.output.csv or, when
// unset, to `console`; JSON, SVG and binary artifacts only when requested.
Record run(const RunConfig& config, std::ostream& console);

}  // namespace phivar::cli
