#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace gcons {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> files;  // artifacts written, relative to out dir
    std::string message;
};

/// 64-bit FNV-1a over the canonical (sorted-key) config dump; echoed in every
/// output file so results can be traced back to their configuration.
std::string config_hash(const nlohmann::json& config);

/// Dry-run feasibility report: parameter windows, parity, file existence.
/// Returns one human-readable line per violation (empty = valid).
std::vector<std::string> validate_config(const nlohmann::json& config);

/// Dispatches on config["kind"]: generate | spectral | design | simulate |
/// select | recover | compare | scan | validate. Writes artifacts under
/// config["out"], including manifest.json. Deterministic for fixed seeds
/// (timing columns aside).
RunResult run_experiment(nlohmann::json config);

/// Flag-style entry point: --config FILE --kind K --seed S --out DIR
/// --override key.path=value. Returns the process exit code
/// (0 ok, 2 config error, 3 numerical failure).
int run_cli(int argc, char** argv);

}  // namespace gcons
