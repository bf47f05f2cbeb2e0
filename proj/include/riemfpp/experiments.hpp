#pragma once

#include <map>
#include <string>
#include <vector>

#include "riemfpp/config.hpp"

namespace riemfpp {

inline constexpr const char* kToolVersion = "0.1.0";

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0;
    double bound = 0;
    std::string note;
};

struct RunManifest {
    std::string config_hash;
    std::string tool_version = kToolVersion;
    std::string kind;
    uint64_t base_seed = 0;
    std::vector<uint64_t> replicate_seeds;
    std::vector<std::string> files;  // relative to the output directory
    std::map<std::string, double> timings_seconds;
};

struct RunResult {
    RunManifest manifest;
    std::vector<CheckResult> checks;
    bool all_pass = true;
    std::string out_dir;
};

/// Execute the configured experiment, writing every CSV/JSON artifact plus
/// manifest.json and summary.json into cfg.out_dir. Deterministic in
/// (config, base_seed) apart from the manifest timing fields.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace riemfpp
