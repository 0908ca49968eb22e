// pisac: train and evaluate pinching-antenna ISAC resource policies, and
// reproduce the deployment/algorithm comparison studies.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pisac/checkpoint.hpp"
#include "pisac/config.hpp"
#include "pisac/kernels.hpp"
#include "pisac/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<uint64_t> seeds;
    std::string out_dir;
    std::string deployment;
    std::string algorithm;
    int episodes = -1;
    double per_antenna_power = -1.0;
    int jobs = 0;
    std::string kernels = "auto";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file")->required();
    cmd->add_option("--seed", args.seeds, "seed (repeatable, overrides config)");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--deployment", args.deployment, "deployment geometry")
        ->check(CLI::IsMember({"1d", "2d", "3d"}));
    cmd->add_option("--algorithm", args.algorithm, "optimizer")
        ->check(CLI::IsMember({"hgrl", "grl", "mlp_a2c", "random"}));
    cmd->add_option("--episodes", args.episodes, "training episodes per run");
    cmd->add_option("--per-antenna-power", args.per_antenna_power, "per-antenna power cap in watts");
    cmd->add_option("--jobs", args.jobs, "parallel runs (default: hardware)");
    cmd->add_option("--kernels", args.kernels, "kernel backend")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
}

pisac::ExperimentConfig load_with_overrides(const CommonArgs& args) {
    pisac::ExperimentConfig cfg = pisac::load_config(args.config_path);
    if (!args.seeds.empty()) cfg.seeds = args.seeds;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (!args.deployment.empty())
        cfg.world.deployment = args.deployment == "1d"   ? pisac::DeploymentKind::OneD
                               : args.deployment == "2d" ? pisac::DeploymentKind::TwoD
                                                         : pisac::DeploymentKind::ThreeD;
    if (!args.algorithm.empty()) cfg.algorithm = pisac::algo_from_string(args.algorithm);
    if (args.episodes >= 0) cfg.train.episodes = args.episodes;
    if (args.per_antenna_power > 0.0) {
        cfg.per_antenna_power_w = args.per_antenna_power;
        cfg.world.max_user_power = args.per_antenna_power * cfg.world.n_antennas;
    }
    if (args.kernels == "scalar") pisac::kernels::select(pisac::kernels::Backend::Scalar);
    if (args.kernels == "avx2") pisac::kernels::select(pisac::kernels::Backend::Avx2);
    return cfg;
}

void print_report(const pisac::RunReport& report) {
    std::cout << "algorithm deployment power seed final100_reward avg_rate(bps/Hz) avg_snr(dB)\n";
    for (const auto& run : report.runs) {
        if (!run.ok()) {
            std::cout << run.spec.label() << " FAILED: " << run.error << "\n";
            continue;
        }
        const double snr = report.config.world.snr_mode == pisac::SnrAmplitudeMode::Sqrt
                               ? run.eval.avg_snr_sqrt
                               : run.eval.avg_snr_literal;
        std::printf("%-9s %-10s %-5g %-4llu %-15.4f %-16.4f %.2f\n",
                    pisac::to_string(run.spec.algo), pisac::to_string(run.spec.deployment),
                    run.spec.per_antenna_power, static_cast<unsigned long long>(run.spec.seed),
                    run.final_window_reward, run.eval.avg_user_rate,
                    pisac::linear_to_db(std::max(snr, 1e-30)));
    }
    std::cout << "summary: " << report.config.out_dir << "/summary.csv\n";
}

int cmd_train(const CommonArgs& args) {
    const pisac::ExperimentConfig cfg = load_with_overrides(args);
    const pisac::RunReport report = pisac::run(cfg, args.jobs);
    print_report(report);
    for (const auto& run : report.runs)
        if (!run.ok()) return 1;
    return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& checkpoint_path, int eval_episodes) {
    pisac::ExperimentConfig cfg = load_with_overrides(args);
    const uint64_t seed = cfg.seeds.front();

    pisac::RunSpec spec{cfg.algorithm, cfg.world.deployment, cfg.per_antenna_power_w, seed};
    pisac::Environment env(pisac::world_for(cfg, spec));
    env.reset(seed);
    pisac::TrainConfig train = cfg.train;
    train.seed = seed;
    pisac::Agent agent(cfg.algorithm, env, train);
    pisac::from_checkpoint(agent.policy().params(), pisac::read_checkpoint(checkpoint_path));

    const int episodes = eval_episodes > 0 ? eval_episodes : cfg.train.eval_episodes;
    const auto metrics = agent.evaluate(env, episodes, pisac::mix_seed(seed, 0xeba1));
    std::printf("episodes:          %d\n", metrics.episodes);
    std::printf("avg reward:        %.4f\n", metrics.avg_reward);
    std::printf("avg rate (bps/Hz): %.4f\n", metrics.avg_user_rate);
    std::printf("avg snr sqrt:      %.2f dB\n",
                pisac::linear_to_db(std::max(metrics.avg_snr_sqrt, 1e-30)));
    std::printf("avg snr literal:   %.2f dB\n",
                pisac::linear_to_db(std::max(metrics.avg_snr_literal, 1e-30)));
    return 0;
}

int cmd_compare_deployments(const CommonArgs& args, const std::vector<double>& powers) {
    const pisac::ExperimentConfig cfg = load_with_overrides(args);
    std::vector<double> power_list = powers;
    if (power_list.empty()) power_list.push_back(cfg.per_antenna_power_w);

    std::vector<pisac::RunSpec> specs;
    for (double power : power_list)
        for (auto dep : {pisac::DeploymentKind::OneD, pisac::DeploymentKind::TwoD,
                         pisac::DeploymentKind::ThreeD})
            for (uint64_t seed : cfg.seeds) specs.push_back({cfg.algorithm, dep, power, seed});

    const pisac::RunReport report = pisac::run_specs(cfg, specs, args.jobs);
    print_report(report);
    std::cout << "\n" << pisac::compare_groups(pisac::summarize(report)).render();
    return 0;
}

int cmd_compare_algorithms(const CommonArgs& args) {
    const pisac::ExperimentConfig cfg = load_with_overrides(args);
    std::vector<pisac::RunSpec> specs;
    for (auto algo : {pisac::AlgoKind::Hgrl, pisac::AlgoKind::Grl, pisac::AlgoKind::MlpA2c,
                      pisac::AlgoKind::Random})
        for (uint64_t seed : cfg.seeds)
            specs.push_back({algo, cfg.world.deployment, cfg.per_antenna_power_w, seed});

    const pisac::RunReport report = pisac::run_specs(cfg, specs, args.jobs);
    print_report(report);
    std::cout << "\n" << pisac::compare_groups(pisac::summarize(report)).render();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pinching-antenna ISAC trainer and experiment runner"};
    app.require_subcommand(1);

    CommonArgs train_args, eval_args, cmp_dep_args, cmp_algo_args;
    std::string checkpoint_path;
    int eval_episodes = -1;
    std::vector<double> powers;

    CLI::App* train = app.add_subcommand("train", "train per config and write curves + summary");
    add_common(train, train_args);

    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint with the greedy policy");
    add_common(eval, eval_args);
    eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    eval->add_option("--eval-episodes", eval_episodes, "greedy evaluation episodes");

    CLI::App* cmp_dep =
        app.add_subcommand("compare-deployments", "run 1d/2d/3d across seeds and rank them");
    add_common(cmp_dep, cmp_dep_args);
    cmp_dep->add_option("--power", powers, "per-antenna power level (repeatable)");

    CLI::App* cmp_algo =
        app.add_subcommand("compare-algorithms", "run hgrl/grl/mlp_a2c/random across seeds");
    add_common(cmp_algo, cmp_algo_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(train_args);
        if (eval->parsed()) return cmd_eval(eval_args, checkpoint_path, eval_episodes);
        if (cmp_dep->parsed()) return cmd_compare_deployments(cmp_dep_args, powers);
        if (cmp_algo->parsed()) return cmd_compare_algorithms(cmp_algo_args);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
