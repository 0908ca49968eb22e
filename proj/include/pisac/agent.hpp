#pragma once

#include <cstdint>
#include <vector>

#include "pisac/env.hpp"
#include "pisac/policy.hpp"

namespace pisac {

struct TrainConfig {
    int episodes = 2000;
    double discount = 0.99;
    double clip_epsilon = 0.2;
    double actor_lr = 3e-4;
    double critic_lr = 1e-3;
    double entropy_weight = 0.01;
    double grad_clip = 1.0;
    int hidden = 64;
    int gnn_layers = 2;
    int eval_episodes = 100;
    uint64_t seed = 1;
};

/// One-step TD advantage and return target: next_value is masked out on
/// terminal steps.
struct TdEstimate {
    double advantage;
    double return_target;
};
TdEstimate advantage_td(double reward, double value, double next_value, bool done,
                        double discount);

/// Clipped surrogate over a batch, advantages treated as constants:
/// -mean(min(ratio * A, clip(ratio, 1-eps, 1+eps) * A)).
double clipped_policy_loss(const std::vector<double>& log_prob_new,
                           const std::vector<double>& log_prob_old,
                           const std::vector<double>& advantage, double clip_epsilon);

/// Mean squared error between value estimates and return targets.
double value_loss(const std::vector<double>& values, const std::vector<double>& returns);

/// One stored rollout step, as consumed by the update.
struct Transition {
    Observation obs;
    RawAction action;
    double log_prob_old = 0.0;
    double reward = 0.0;
    double value = 0.0;
    bool done = false;
};

/// Builds the combined update objective on the tape and returns the scalar
/// loss node: clipped surrogate - entropy bonus + value MSE, batch-averaged,
/// with advantages/returns treated as constants.
int build_update_loss(Tape& tape, const ActorCritic& policy,
                      const std::vector<Transition>& rollout,
                      const std::vector<double>& advantages,
                      const std::vector<double>& returns, double clip_epsilon,
                      double entropy_weight);

struct EpisodeStats {
    int episode = 0;
    double reward = 0.0;           // undiscounted return
    double sum_rate = 0.0;         // mean over slots of the slot sum-rate
    double min_sensing_snr = 0.0;  // linear, min over slots and targets
    double energy_used = 0.0;
};

struct EvalMetrics {
    double avg_reward = 0.0;
    double avg_user_rate = 0.0;       // mean over episodes/slots/users, bps/Hz
    double avg_snr_sqrt = 0.0;        // linear, sqrt(p/M) amplitude reading
    double avg_snr_literal = 0.0;     // linear, literal p/M amplitude reading
    int episodes = 0;
};

/// One training run: the policy, its optimizer, and Algorithm-1 style
/// rollout/update loop. Deterministic for a fixed (config, seed).
class Agent {
  public:
    Agent(AlgoKind kind, const Environment& env, const TrainConfig& cfg);

    /// Runs cfg.episodes episodes, one combined actor/critic update per
    /// rollout. Returns the learning curve. Throws std::runtime_error when a
    /// parameter diverges to a non-finite value.
    std::vector<EpisodeStats> train(Environment& env);

    /// Greedy (mean-action) rollouts, no learning, fresh seed stream.
    EvalMetrics evaluate(Environment& env, int episodes, uint64_t seed) const;

    ActorCritic& policy() { return policy_; }
    const ActorCritic& policy() const { return policy_; }
    AlgoKind kind() const { return kind_; }

  private:
    Observation observe(const Environment& env) const;
    RawAction sample_action(const Observation& obs, Rng& rng, double& log_prob,
                            double& value) const;
    void update(const std::vector<Transition>& rollout);

    AlgoKind kind_;
    TrainConfig cfg_;
    ActorCritic policy_;
    Adam optimizer_;
};

}  // namespace pisac
