#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pisac/agent.hpp"
#include "pisac/env.hpp"
#include "pisac/policy.hpp"

namespace pisac {

double dbm_to_watts(double dbm);
double db_to_linear(double db);
double linear_to_db(double linear);

/// Fully resolved experiment description. Loaded from a flat INI-style file
/// with [scenario], [train] and [output] sections; unknown sections or keys
/// are rejected with the offending line. Every key has a reference default,
/// and unit-bearing keys (dBm, dB) are converted once here.
struct ExperimentConfig {
    WorldSpec world;                 // scenario block, resolved units
    TrainConfig train;               // per-run seed is filled by the runner
    AlgoKind algorithm = AlgoKind::Hgrl;
    std::vector<uint64_t> seeds{1};
    std::string out_dir = "out";
    bool write_checkpoints = true;

    // Kept for provenance echo (the resolved world carries the converted
    // values).
    double noise_dbm = -90.0;
    double gamma_min_db = 5.0;
    double per_antenna_power_w = 0.1;
    double total_power_w = 100.0;

    /// Renders the fully resolved config as a loadable INI document;
    /// reloading it reproduces this config exactly.
    std::string echo_ini() const;

    /// FNV-1a over the rendered scenario section; compare() refuses reports
    /// whose scenario hashes differ.
    uint64_t scenario_hash() const;
};

/// Parses and validates `text`. Throws std::runtime_error with line context
/// on unknown keys, bad numbers/units, or an empty document.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");

/// Reads the file at `path` and parses it.
ExperimentConfig load_config(const std::string& path);

}  // namespace pisac
