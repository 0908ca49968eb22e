#pragma once

#include <string>
#include <vector>

#include "pisac/config.hpp"

namespace pisac {

/// One (algorithm, deployment, per-antenna power, seed) training cell.
struct RunSpec {
    AlgoKind algo = AlgoKind::Hgrl;
    DeploymentKind deployment = DeploymentKind::ThreeD;
    double per_antenna_power = 0.1;  // watts
    uint64_t seed = 1;

    std::string label() const;  // e.g. "hgrl_3d_p0.1_seed1"
};

struct RunOutcome {
    RunSpec spec;
    std::vector<EpisodeStats> curve;
    EvalMetrics eval;
    double final_window_reward = 0.0;  // mean reward over the last 100 episodes
    std::string curve_path;
    std::string checkpoint_path;  // empty for the random baseline
    std::string error;            // nonempty when the run failed

    bool ok() const { return error.empty(); }
};

struct RunReport {
    ExperimentConfig config;
    uint64_t scenario_hash = 0;
    std::vector<RunOutcome> runs;
};

/// Derives the world for one cell (deployment + power override) from the
/// configured scenario.
WorldSpec world_for(const ExperimentConfig& cfg, const RunSpec& spec);

/// Trains and evaluates one cell; writes curves.csv (and a checkpoint unless
/// the algorithm is random or checkpoints are disabled). Failures land in
/// `error` instead of throwing.
RunOutcome execute_run(const ExperimentConfig& cfg, const RunSpec& spec);

/// Runs every cell (in parallel up to `jobs` threads; each run is
/// self-contained and seed-deterministic), then writes summary.csv and
/// config_echo.ini under the output directory.
RunReport run_specs(const ExperimentConfig& cfg, const std::vector<RunSpec>& specs, int jobs = 0);

/// The config's own algorithm x deployment x seeds product.
RunReport run(const ExperimentConfig& cfg, int jobs = 0);

std::string summary_csv(const RunReport& report);
std::string plot_script(const RunReport& report);
std::string curve_csv(const std::vector<EpisodeStats>& curve);

/// Per-(algorithm, deployment, power) aggregation across seeds.
struct GroupSummary {
    AlgoKind algo;
    DeploymentKind deployment;
    double per_antenna_power;
    std::vector<double> final_rewards;  // per seed
    std::vector<double> eval_rates;     // per seed, bps/Hz per user
    std::vector<double> eval_snrs;      // per seed, linear, configured mode
    double mean_final_reward = 0.0;
    double std_final_reward = 0.0;
    double mean_eval_rate = 0.0;
    double std_eval_rate = 0.0;
    double mean_eval_snr = 0.0;
    std::string label() const;
};

std::vector<GroupSummary> summarize(const RunReport& report);

/// Pairwise ordering with a per-pair sign test across seeds.
struct PairOrdering {
    std::string left;
    std::string right;
    double left_mean = 0.0;
    double right_mean = 0.0;
    int wins = 0;   // seeds where left > right
    int total = 0;  // paired seeds
    bool holds() const { return left_mean > right_mean; }
};

struct Comparison {
    std::vector<GroupSummary> groups;
    std::vector<PairOrdering> reward_pairs;
    std::vector<PairOrdering> rate_pairs;
    bool single_seed_warning = false;
    std::string render() const;
};

/// Ordering table over a set of group summaries (all pairs).
Comparison compare_groups(std::vector<GroupSummary> groups);

/// Joint ordering table over several reports. Throws std::runtime_error when
/// scenario hashes differ; needs at least two reports.
Comparison compare(const std::vector<RunReport>& reports);

}  // namespace pisac
