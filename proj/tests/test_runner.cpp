#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pisac/runner.hpp"

using namespace pisac;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

ExperimentConfig small_config(const std::string& out_dir) {
    ExperimentConfig cfg = parse_config(
        "[scenario]\nusers = 2\nantennas = 3\nslots = 4\nper_antenna_power_w = 0.1\n"
        "[train]\nepisodes = 6\nhidden_dim = 16\nseeds = 1,2\neval_episodes = 3\n"
        "[output]\ndir = " + out_dir + "\n");
    return cfg;
}

}  // namespace

TEST_CASE("run writes curves, checkpoints, summary and a loadable echo") {
    const std::string out = (std::filesystem::temp_directory_path() / "pisac_run_test").string();
    std::filesystem::remove_all(out);
    const ExperimentConfig cfg = small_config(out);

    const RunReport report = run(cfg, 2);
    REQUIRE(report.runs.size() == 2);
    for (const auto& r : report.runs) {
        INFO(r.error);
        CHECK(r.ok());
        CHECK(r.curve.size() == 6);
        CHECK(std::filesystem::exists(r.curve_path));
        CHECK(std::filesystem::exists(r.checkpoint_path));
    }
    CHECK(std::filesystem::exists(out + "/summary.csv"));

    const std::string summary = slurp(out + "/summary.csv");
    CHECK(summary.find("algorithm,deployment,per_antenna_power_w,seed,episodes,final100_reward,"
                       "avg_rate_bps_hz,avg_snr_sqrt_db,avg_snr_literal_db,snr_mode,error") !=
          std::string::npos);

    // curve CSV schema is fixed
    const std::string curve = slurp(report.runs[0].curve_path);
    CHECK(curve.rfind("episode,reward,sum_rate,min_sensing_snr_db,energy_used\n", 0) == 0);

    // the echoed config reproduces the exact same curves and checkpoints
    const ExperimentConfig echoed =
        parse_config(slurp(out + "/config_echo.ini"), "config_echo.ini");
    const std::string out2 = out + "_replay";
    std::filesystem::remove_all(out2);
    ExperimentConfig replay = echoed;
    replay.out_dir = out2;
    const RunReport report2 = run(replay, 2);
    REQUIRE(report2.runs.size() == 2);
    for (size_t i = 0; i < report.runs.size(); ++i) {
        CHECK(slurp(report.runs[i].curve_path) == slurp(report2.runs[i].curve_path));
        CHECK(slurp(report.runs[i].checkpoint_path) == slurp(report2.runs[i].checkpoint_path));
    }

    std::filesystem::remove_all(out);
    std::filesystem::remove_all(out2);
}

TEST_CASE("random baseline runs write no checkpoint") {
    const std::string out = (std::filesystem::temp_directory_path() / "pisac_rand_test").string();
    std::filesystem::remove_all(out);
    ExperimentConfig cfg = small_config(out);
    cfg.algorithm = AlgoKind::Random;
    cfg.seeds = {1};

    const RunReport report = run(cfg, 1);
    REQUIRE(report.runs.size() == 1);
    CHECK(report.runs[0].ok());
    CHECK(report.runs[0].checkpoint_path.empty());
    std::filesystem::remove_all(out);
}

TEST_CASE("infeasible geometry is reported per run without aborting siblings") {
    const std::string out = (std::filesystem::temp_directory_path() / "pisac_incomp").string();
    std::filesystem::remove_all(out);
    ExperimentConfig cfg = small_config(out);
    cfg.world.min_spacing = 30.0;  // 3 antennas x 30 m never fit on one 50 m guide
    cfg.world.deployment = DeploymentKind::OneD;
    cfg.seeds = {1, 2};

    const RunReport report = run(cfg, 2);
    REQUIRE(report.runs.size() == 2);
    for (const auto& r : report.runs) {
        CHECK_FALSE(r.ok());
        CHECK(r.error.find("infeasible") != std::string::npos);
    }
    std::filesystem::remove_all(out);
}

TEST_CASE("summarize groups by cell and compare ranks pairs") {
    const std::string out = (std::filesystem::temp_directory_path() / "pisac_cmp").string();
    std::filesystem::remove_all(out);
    const ExperimentConfig cfg = small_config(out);

    std::vector<RunSpec> specs;
    for (uint64_t seed : {1ull, 2ull}) {
        specs.push_back({AlgoKind::Random, DeploymentKind::OneD, 0.1, seed});
        specs.push_back({AlgoKind::Random, DeploymentKind::ThreeD, 0.1, seed});
    }
    const RunReport report = run_specs(cfg, specs, 2);
    const auto groups = summarize(report);
    CHECK(groups.size() == 2);
    for (const auto& g : groups) CHECK(g.final_rewards.size() == 2);

    const Comparison cmp = compare_groups(groups);
    CHECK(cmp.groups.size() == 2);
    CHECK(cmp.rate_pairs.size() == 1);
    CHECK(cmp.reward_pairs.size() == 1);
    CHECK(cmp.rate_pairs[0].total == 2);
    CHECK_FALSE(cmp.single_seed_warning);
    CHECK(cmp.render().find("pairwise") != std::string::npos);

    std::filesystem::remove_all(out);
}

TEST_CASE("compare refuses mismatched scenarios and flags single seeds") {
    const std::string out = (std::filesystem::temp_directory_path() / "pisac_cmp2").string();
    std::filesystem::remove_all(out);
    ExperimentConfig cfg = small_config(out);
    cfg.algorithm = AlgoKind::Random;
    cfg.seeds = {1};

    const RunReport a = run(cfg, 1);

    SUBCASE("identical reports compare with zero differences") {
        const Comparison cmp = compare({a, a});
        REQUIRE(cmp.groups.size() == 2);
        CHECK(cmp.groups[0].mean_final_reward == cmp.groups[1].mean_final_reward);
        CHECK(cmp.single_seed_warning);  // one seed per report
        for (const auto& p : cmp.reward_pairs) {
            CHECK_FALSE(p.holds());  // strict > fails on equality
            CHECK(p.wins == 0);
        }
    }
    SUBCASE("different worlds are refused") {
        ExperimentConfig other = cfg;
        other.world.area = 75.0;
        RunReport b = a;
        b.scenario_hash = other.scenario_hash();
        CHECK_THROWS_AS(compare({a, b}), std::runtime_error);
    }
    SUBCASE("fewer than two reports is an error") {
        CHECK_THROWS_AS(compare({a}), std::runtime_error);
    }
    std::filesystem::remove_all(out);
}
