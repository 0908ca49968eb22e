#include "pisac/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pisac {
namespace {

constexpr double kLogTwoPi = 1.8378770664093453;

PolicyConfig make_policy_config(AlgoKind kind, const Environment& env, const TrainConfig& cfg) {
    const WorldSpec& w = env.spec();
    PolicyConfig pc;
    pc.kind = kind == AlgoKind::Random ? AlgoKind::Hgrl : kind;  // random keeps an unused net
    pc.feature_dim = w.context_features ? 7 : 6;
    pc.flat_dim = 3 * (w.n_antennas + w.n_users + w.n_targets) + 2 * w.n_users;
    pc.action_dim = env.action_limits().raw_dim();
    pc.hidden = cfg.hidden;
    pc.gnn_layers = cfg.gnn_layers;
    return pc;
}

}  // namespace

TdEstimate advantage_td(double reward, double value, double next_value, bool done,
                        double discount) {
    const double target = reward + discount * next_value * (done ? 0.0 : 1.0);
    return {target - value, target};
}

double clipped_policy_loss(const std::vector<double>& log_prob_new,
                           const std::vector<double>& log_prob_old,
                           const std::vector<double>& advantage, double clip_epsilon) {
    if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0))
        throw std::invalid_argument("clip epsilon must lie in (0, 1)");
    double acc = 0.0;
    for (size_t t = 0; t < log_prob_new.size(); ++t) {
        const double ratio = std::exp(log_prob_new[t] - log_prob_old[t]);
        const double clipped = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
        acc += std::min(ratio * advantage[t], clipped * advantage[t]);
    }
    return -acc / static_cast<double>(log_prob_new.size());
}

double value_loss(const std::vector<double>& values, const std::vector<double>& returns) {
    double acc = 0.0;
    for (size_t t = 0; t < values.size(); ++t) {
        const double d = values[t] - returns[t];
        acc += d * d;
    }
    return acc / static_cast<double>(values.size());
}

Agent::Agent(AlgoKind kind, const Environment& env, const TrainConfig& cfg)
    : kind_(kind), cfg_(cfg), policy_(make_policy_config(kind, env, cfg), cfg.seed) {
    optimizer_.add_group(policy_.actor_param_ids(), cfg_.actor_lr);
    optimizer_.add_group(policy_.critic_param_ids(), cfg_.critic_lr);
}

Observation Agent::observe(const Environment& env) const {
    Observation obs;
    if (policy_.config().kind == AlgoKind::MlpA2c)
        obs.flat = env.flat_state();
    else
        obs.graph = env.graph();
    return obs;
}

RawAction Agent::sample_action(const Observation& obs, Rng& rng, double& log_prob,
                               double& value) const {
    if (kind_ == AlgoKind::Random) {
        RawAction action(static_cast<size_t>(policy_.config().action_dim));
        for (double& a : action) a = rng.uniform(-1.0, 1.0);
        log_prob = 0.0;
        value = 0.0;
        return action;
    }

    Tape tape(const_cast<ParamStore*>(&policy_.params()));
    const auto nodes = policy_.forward(tape, obs);
    const std::vector<double>& mean = tape.value(nodes.mean).data;
    const std::vector<double>& log_std = tape.value(nodes.log_std).data;
    value = tape.value(nodes.value).scalar();

    RawAction action(mean.size());
    for (size_t i = 0; i < mean.size(); ++i)
        action[i] = mean[i] + std::exp(log_std[i]) * rng.normal();
    log_prob = gaussian_log_prob(action, mean, log_std);
    return action;
}

int build_update_loss(Tape& tape, const ActorCritic& policy,
                      const std::vector<Transition>& rollout,
                      const std::vector<double>& advantages,
                      const std::vector<double>& returns, double clip_epsilon,
                      double entropy_weight) {
    const size_t n = rollout.size();
    int policy_acc = -1;
    int value_acc = -1;
    int log_std_node = -1;
    for (size_t t = 0; t < n; ++t) {
        const auto nodes = policy.forward(tape, rollout[t].obs);
        log_std_node = nodes.log_std;

        // Diagonal-Gaussian log-density of the stored action at the new mean.
        const int action = tape.constant(Matrix(1, policy.config().action_dim, rollout[t].action));
        const int sigma = tape.exp_op(nodes.log_std);
        const int z = tape.div(tape.sub(nodes.mean, action), sigma);
        const int lp = tape.add_const(
            tape.sub(tape.scale(tape.sum_all(tape.mul(z, z)), -0.5), tape.sum_all(nodes.log_std)),
            -0.5 * kLogTwoPi * policy.config().action_dim);

        const int ratio = tape.exp_op(tape.add_const(lp, -rollout[t].log_prob_old));
        const int clipped = tape.clip(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
        const int surrogate =
            tape.min_elem(tape.scale(ratio, advantages[t]), tape.scale(clipped, advantages[t]));
        policy_acc = policy_acc < 0 ? surrogate : tape.add(policy_acc, surrogate);

        const int err = tape.add_const(nodes.value, -returns[t]);
        const int sq = tape.mul(err, err);
        value_acc = value_acc < 0 ? sq : tape.add(value_acc, sq);
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    const int policy_loss = tape.scale(policy_acc, -inv_n);
    const int value_term = tape.scale(value_acc, inv_n);
    // log_std is state independent, so the entropy bonus is one term.
    const int entropy = tape.add_const(tape.sum_all(log_std_node),
                                       0.5 * (kLogTwoPi + 1.0) * policy.config().action_dim);
    return tape.add(tape.sub(policy_loss, tape.scale(entropy, entropy_weight)), value_term);
}

void Agent::update(const std::vector<Transition>& rollout) {
    const size_t n = rollout.size();
    std::vector<double> advantages(n), returns(n);
    for (size_t t = 0; t < n; ++t) {
        const double next_value = t + 1 < n ? rollout[t + 1].value : 0.0;
        const TdEstimate td = advantage_td(rollout[t].reward, rollout[t].value, next_value,
                                           rollout[t].done, cfg_.discount);
        advantages[t] = td.advantage;
        returns[t] = td.return_target;
    }

    ParamStore& params = policy_.params();
    params.zero_grad();
    Tape tape(&params);
    tape.backward(build_update_loss(tape, policy_, rollout, advantages, returns,
                                    cfg_.clip_epsilon, cfg_.entropy_weight));

    const double norm = params.grad_norm();
    if (norm > cfg_.grad_clip && norm > 0.0) params.scale_grads(cfg_.grad_clip / norm);
    optimizer_.step(params);
    policy_.clamp_log_std();

    if (!params.all_finite())
        throw std::runtime_error("training diverged: non-finite parameter after update");
}

std::vector<EpisodeStats> Agent::train(Environment& env) {
    std::vector<EpisodeStats> curve;
    curve.reserve(static_cast<size_t>(cfg_.episodes));
    Rng sampler(mix_seed(cfg_.seed, 0x5a4d));

    for (int episode = 0; episode < cfg_.episodes; ++episode) {
        env.reset(mix_seed(cfg_.seed, static_cast<uint64_t>(episode)));

        std::vector<Transition> rollout;
        rollout.reserve(static_cast<size_t>(env.spec().slots));
        EpisodeStats stats;
        stats.episode = episode;
        stats.min_sensing_snr = std::numeric_limits<double>::infinity();

        int slots = 0;
        while (!env.done()) {
            Transition tr;
            tr.obs = observe(env);
            tr.action = sample_action(tr.obs, sampler, tr.log_prob_old, tr.value);
            const StepResult result = env.step(tr.action);
            tr.reward = result.reward.total;
            tr.done = result.done;
            rollout.push_back(std::move(tr));

            stats.reward += result.reward.total;
            stats.sum_rate += result.reward.sum_rate;
            for (double snr : result.metrics.sensing_snrs)
                stats.min_sensing_snr = std::min(stats.min_sensing_snr, snr);
            slots += 1;
        }
        stats.sum_rate /= static_cast<double>(slots);
        stats.energy_used = env.energy_used();

        if (kind_ != AlgoKind::Random) update(rollout);
        curve.push_back(stats);
    }
    return curve;
}

EvalMetrics Agent::evaluate(Environment& env, int episodes, uint64_t seed) const {
    EvalMetrics metrics;
    metrics.episodes = episodes;
    Rng sampler(mix_seed(seed, 0xe5a1));
    long slot_count = 0;

    for (int e = 0; e < episodes; ++e) {
        env.reset(mix_seed(seed, static_cast<uint64_t>(e)));
        while (!env.done()) {
            const Observation obs = observe(env);
            RawAction action;
            if (kind_ == AlgoKind::Random) {
                action.resize(static_cast<size_t>(policy_.config().action_dim));
                for (double& a : action) a = sampler.uniform(-1.0, 1.0);
            } else {
                Tape tape(const_cast<ParamStore*>(&policy_.params()));
                action = tape.value(policy_.forward(tape, obs).mean).data;
            }
            const StepResult result = env.step(action);

            metrics.avg_reward += result.reward.total;
            double rate_sum = 0.0;
            for (double r : result.metrics.rates) rate_sum += r;
            metrics.avg_user_rate += rate_sum / static_cast<double>(result.metrics.rates.size());

            const SnrAmplitudeMode active = env.spec().snr_mode;
            for (size_t l = 0; l < env.scenario().targets.size(); ++l) {
                const double active_snr = result.metrics.sensing_snrs[l];
                const double other_snr = sensing_snr(
                    static_cast<int>(l), env.layout(), env.scenario().waveguides, env.rf(),
                    env.allocation(), env.scenario(),
                    active == SnrAmplitudeMode::Sqrt ? SnrAmplitudeMode::AsWritten
                                                     : SnrAmplitudeMode::Sqrt);
                const double nt = static_cast<double>(env.scenario().targets.size());
                if (active == SnrAmplitudeMode::Sqrt) {
                    metrics.avg_snr_sqrt += active_snr / nt;
                    metrics.avg_snr_literal += other_snr / nt;
                } else {
                    metrics.avg_snr_sqrt += other_snr / nt;
                    metrics.avg_snr_literal += active_snr / nt;
                }
            }
            slot_count += 1;
        }
    }

    if (slot_count > 0) {
        metrics.avg_reward /= static_cast<double>(episodes);
        metrics.avg_user_rate /= static_cast<double>(slot_count);
        metrics.avg_snr_sqrt /= static_cast<double>(slot_count);
        metrics.avg_snr_literal /= static_cast<double>(slot_count);
    }
    return metrics;
}

}  // namespace pisac
