#include "pisac/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pisac/checkpoint.hpp"

namespace pisac {
namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string short_power(double w) {
    std::ostringstream out;
    out << w;
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

double final_window_mean(const std::vector<EpisodeStats>& curve, int window = 100) {
    if (curve.empty()) return 0.0;
    const size_t n = std::min<size_t>(static_cast<size_t>(window), curve.size());
    double acc = 0.0;
    for (size_t i = curve.size() - n; i < curve.size(); ++i) acc += curve[i].reward;
    return acc / static_cast<double>(n);
}

}  // namespace

std::string RunSpec::label() const {
    std::ostringstream out;
    out << to_string(algo) << "_" << to_string(deployment) << "_p" << short_power(per_antenna_power)
        << "_seed" << seed;
    return out.str();
}

WorldSpec world_for(const ExperimentConfig& cfg, const RunSpec& spec) {
    WorldSpec world = cfg.world;
    world.deployment = spec.deployment;
    world.max_user_power = spec.per_antenna_power * world.n_antennas;
    return world;
}

RunOutcome execute_run(const ExperimentConfig& cfg, const RunSpec& spec) {
    RunOutcome outcome;
    outcome.spec = spec;
    try {
        Environment env(world_for(cfg, spec));
        env.reset(spec.seed);  // materialize a prototype state for shape discovery

        TrainConfig train = cfg.train;
        train.seed = spec.seed;
        Agent agent(spec.algo, env, train);
        outcome.curve = agent.train(env);
        outcome.final_window_reward = final_window_mean(outcome.curve);
        outcome.eval = agent.evaluate(env, train.eval_episodes, mix_seed(spec.seed, 0xeba1));

        std::filesystem::create_directories(cfg.out_dir);
        outcome.curve_path = cfg.out_dir + "/curves_" + spec.label() + ".csv";
        write_text_file(outcome.curve_path, curve_csv(outcome.curve));
        if (cfg.write_checkpoints && spec.algo != AlgoKind::Random) {
            outcome.checkpoint_path = cfg.out_dir + "/ckpt_" + spec.label() + ".bin";
            write_checkpoint(to_checkpoint(agent.policy().params()), outcome.checkpoint_path);
        }
    } catch (const std::exception& err) {
        outcome.error = err.what();
    }
    return outcome;
}

RunReport run_specs(const ExperimentConfig& cfg, const std::vector<RunSpec>& specs, int jobs) {
    RunReport report;
    report.config = cfg;
    report.scenario_hash = cfg.scenario_hash();
    report.runs.resize(specs.size());

    if (jobs <= 0)
        jobs = static_cast<int>(std::min<size_t>(specs.size(),
                                                 std::max(1u, std::thread::hardware_concurrency())));

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            report.runs[i] = execute_run(cfg, specs[i]);
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::filesystem::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/summary.csv", summary_csv(report));
    write_text_file(cfg.out_dir + "/config_echo.ini", cfg.echo_ini());
    write_text_file(cfg.out_dir + "/plot.gp", plot_script(report));
    return report;
}

RunReport run(const ExperimentConfig& cfg, int jobs) {
    std::vector<RunSpec> specs;
    for (uint64_t seed : cfg.seeds)
        specs.push_back({cfg.algorithm, cfg.world.deployment, cfg.per_antenna_power_w, seed});
    return run_specs(cfg, specs, jobs);
}

std::string plot_script(const RunReport& report) {
    std::ostringstream out;
    out << "# gnuplot script: reward learning curves, one line per run\n";
    out << "set datafile separator ','\n";
    out << "set xlabel 'episode'\n";
    out << "set ylabel 'episode reward'\n";
    out << "set key outside\n";
    out << "plot \\\n";
    bool first = true;
    for (const RunOutcome& run : report.runs) {
        if (!run.ok()) continue;
        const std::string file = std::filesystem::path(run.curve_path).filename().string();
        if (!first) out << ", \\\n";
        out << "  '" << file << "' every ::1 using 1:2 with lines title '" << run.spec.label()
            << "'";
        first = false;
    }
    out << "\n";
    return out.str();
}

std::string curve_csv(const std::vector<EpisodeStats>& curve) {
    std::ostringstream out;
    out << "episode,reward,sum_rate,min_sensing_snr_db,energy_used\n";
    for (const EpisodeStats& row : curve) {
        const double snr_db =
            10.0 * std::log10(std::max(row.min_sensing_snr, 1e-30));  // floor keeps the CSV finite
        out << row.episode << "," << format_number(row.reward) << ","
            << format_number(row.sum_rate) << "," << format_number(snr_db) << ","
            << format_number(row.energy_used) << "\n";
    }
    return out.str();
}

std::string summary_csv(const RunReport& report) {
    std::ostringstream out;
    out << "algorithm,deployment,per_antenna_power_w,seed,episodes,final100_reward,"
           "avg_rate_bps_hz,avg_snr_sqrt_db,avg_snr_literal_db,snr_mode,error\n";
    for (const RunOutcome& run : report.runs) {
        out << to_string(run.spec.algo) << "," << to_string(run.spec.deployment) << ","
            << short_power(run.spec.per_antenna_power) << "," << run.spec.seed << ","
            << run.curve.size() << "," << format_number(run.final_window_reward) << ","
            << format_number(run.eval.avg_user_rate) << ","
            << format_number(linear_to_db(std::max(run.eval.avg_snr_sqrt, 1e-30))) << ","
            << format_number(linear_to_db(std::max(run.eval.avg_snr_literal, 1e-30))) << ","
            << to_string(report.config.world.snr_mode) << "," << run.error << "\n";
    }
    return out.str();
}

std::string GroupSummary::label() const {
    std::ostringstream out;
    out << to_string(algo) << "/" << to_string(deployment) << "/p" << short_power(per_antenna_power);
    return out.str();
}

std::vector<GroupSummary> summarize(const RunReport& report) {
    std::map<std::string, GroupSummary> groups;
    for (const RunOutcome& run : report.runs) {
        if (!run.ok()) continue;
        GroupSummary key;
        key.algo = run.spec.algo;
        key.deployment = run.spec.deployment;
        key.per_antenna_power = run.spec.per_antenna_power;
        auto [it, inserted] = groups.insert({key.label(), key});
        GroupSummary& g = it->second;
        g.final_rewards.push_back(run.final_window_reward);
        g.eval_rates.push_back(run.eval.avg_user_rate);
        g.eval_snrs.push_back(report.config.world.snr_mode == SnrAmplitudeMode::Sqrt
                                  ? run.eval.avg_snr_sqrt
                                  : run.eval.avg_snr_literal);
    }
    std::vector<GroupSummary> out;
    auto mean = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
    };
    auto stddev = [&](const std::vector<double>& v, double m) {
        if (v.size() < 2) return 0.0;
        double acc = 0.0;
        for (double x : v) acc += (x - m) * (x - m);
        return std::sqrt(acc / static_cast<double>(v.size() - 1));
    };
    for (auto& [label, g] : groups) {
        g.mean_final_reward = mean(g.final_rewards);
        g.std_final_reward = stddev(g.final_rewards, g.mean_final_reward);
        g.mean_eval_rate = mean(g.eval_rates);
        g.std_eval_rate = stddev(g.eval_rates, g.mean_eval_rate);
        g.mean_eval_snr = mean(g.eval_snrs);
        out.push_back(std::move(g));
    }
    return out;
}

namespace {

PairOrdering make_pair_ordering(const GroupSummary& a, const GroupSummary& b,
                                const std::vector<double> GroupSummary::* metric,
                                double GroupSummary::* mean_metric) {
    PairOrdering p;
    p.left = a.label();
    p.right = b.label();
    p.left_mean = a.*mean_metric;
    p.right_mean = b.*mean_metric;
    const size_t n = std::min((a.*metric).size(), (b.*metric).size());
    p.total = static_cast<int>(n);
    for (size_t i = 0; i < n; ++i)
        if ((a.*metric)[i] > (b.*metric)[i]) p.wins += 1;
    return p;
}

}  // namespace

Comparison compare_groups(std::vector<GroupSummary> groups) {
    Comparison cmp;
    cmp.groups = std::move(groups);

    for (const GroupSummary& g : cmp.groups)
        if (g.final_rewards.size() < 2) cmp.single_seed_warning = true;

    for (size_t i = 0; i < cmp.groups.size(); ++i) {
        for (size_t j = i + 1; j < cmp.groups.size(); ++j) {
            cmp.reward_pairs.push_back(make_pair_ordering(cmp.groups[i], cmp.groups[j],
                                                          &GroupSummary::final_rewards,
                                                          &GroupSummary::mean_final_reward));
            cmp.rate_pairs.push_back(make_pair_ordering(cmp.groups[i], cmp.groups[j],
                                                        &GroupSummary::eval_rates,
                                                        &GroupSummary::mean_eval_rate));
        }
    }
    return cmp;
}

Comparison compare(const std::vector<RunReport>& reports) {
    if (reports.size() < 2) throw std::runtime_error("compare needs at least two reports");
    for (size_t i = 1; i < reports.size(); ++i)
        if (reports[i].scenario_hash != reports[0].scenario_hash)
            throw std::runtime_error("refusing to compare reports with different scenario hashes");

    std::vector<GroupSummary> groups;
    for (const RunReport& report : reports) {
        std::vector<GroupSummary> part = summarize(report);
        groups.insert(groups.end(), std::make_move_iterator(part.begin()),
                      std::make_move_iterator(part.end()));
    }
    return compare_groups(std::move(groups));
}

std::string Comparison::render() const {
    std::ostringstream out;
    out << "group, final100_reward (mean +- std), eval_rate bps/Hz (mean +- std), "
           "eval_snr_db, seeds\n";
    for (const GroupSummary& g : groups) {
        out << g.label() << ", " << g.mean_final_reward << " +- " << g.std_final_reward << ", "
            << g.mean_eval_rate << " +- " << g.std_eval_rate << ", "
            << linear_to_db(std::max(g.mean_eval_snr, 1e-30)) << ", " << g.final_rewards.size()
            << "\n";
    }
    out << "\npairwise (eval rate): left > right? wins/total\n";
    for (const PairOrdering& p : rate_pairs)
        out << p.left << " vs " << p.right << ": " << (p.holds() ? "yes" : "no") << " (" << p.wins
            << "/" << p.total << ")\n";
    out << "\npairwise (final reward): left > right? wins/total\n";
    for (const PairOrdering& p : reward_pairs)
        out << p.left << " vs " << p.right << ": " << (p.holds() ? "yes" : "no") << " (" << p.wins
            << "/" << p.total << ")\n";
    if (single_seed_warning)
        out << "\nwarning: a group has a single seed; sign tests are not meaningful\n";
    return out.str();
}

}  // namespace pisac
