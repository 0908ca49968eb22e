#include "pisac/policy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pisac {

const char* to_string(AlgoKind kind) {
    switch (kind) {
        case AlgoKind::Hgrl: return "hgrl";
        case AlgoKind::Grl: return "grl";
        case AlgoKind::MlpA2c: return "mlp_a2c";
        case AlgoKind::Random: return "random";
    }
    return "?";
}

AlgoKind algo_from_string(const std::string& name) {
    if (name == "hgrl") return AlgoKind::Hgrl;
    if (name == "grl") return AlgoKind::Grl;
    if (name == "mlp_a2c") return AlgoKind::MlpA2c;
    if (name == "random") return AlgoKind::Random;
    throw std::invalid_argument("unknown algorithm: " + name);
}

ActorCritic::ActorCritic(PolicyConfig cfg, uint64_t seed) : cfg_(cfg) {
    Rng rng(seed);
    if (cfg_.action_dim < 1) throw std::invalid_argument("action_dim must be positive");

    // actor group = encoder + actor head + log_std; the critic head is its
    // own optimizer group.
    auto track = [&](int first, int count) {
        for (int i = 0; i < count; ++i) actor_ids_.push_back(first + i);
    };

    if (cfg_.kind == AlgoKind::MlpA2c) {
        if (cfg_.flat_dim < 1) throw std::invalid_argument("flat_dim must be positive for mlp_a2c");
        int in = cfg_.flat_dim;
        for (int l = 0; l < cfg_.gnn_layers; ++l) {
            const int before = params_.size();
            mlp_.push_back(Dense::create(params_, "encoder.dense" + std::to_string(l), in,
                                         cfg_.hidden, rng));
            track(before, params_.size() - before);
            in = cfg_.hidden;
        }
    } else {
        const bool homogeneous = cfg_.kind == AlgoKind::Grl;
        int in = cfg_.feature_dim;
        for (int l = 0; l < cfg_.gnn_layers; ++l) {
            const int before = params_.size();
            gnn_.push_back(RelGnnLayer::create(params_, "encoder.gnn" + std::to_string(l), in,
                                               cfg_.hidden, homogeneous, Activation::Tanh, rng));
            track(before, params_.size() - before);
            in = cfg_.hidden;
        }
    }

    int before = params_.size();
    actor_hidden_ = Dense::create(params_, "actor.hidden", cfg_.hidden, cfg_.hidden, rng);
    actor_out_ = Dense::create(params_, "actor.out", cfg_.hidden, cfg_.action_dim, rng);
    track(before, params_.size() - before);

    Matrix ls(1, cfg_.action_dim);
    for (double& v : ls.data) v = cfg_.log_std_init;
    log_std_ = params_.add("actor.log_std", std::move(ls));
    actor_ids_.push_back(log_std_);

    critic_hidden_ = Dense::create(params_, "critic.hidden", cfg_.hidden, cfg_.hidden, rng);
    critic_out_ = Dense::create(params_, "critic.out", cfg_.hidden, 1, rng);
}

int ActorCritic::encode(Tape& tape, const Observation& obs) const {
    if (cfg_.kind == AlgoKind::MlpA2c) {
        if (static_cast<int>(obs.flat.size()) != cfg_.flat_dim)
            throw std::invalid_argument("flat observation has wrong width");
        int h = tape.constant(Matrix(1, cfg_.flat_dim, obs.flat));
        for (const Dense& layer : mlp_) h = tape.tanh_op(layer.forward(tape, h));
        return h;
    }
    if (obs.graph.features.cols != cfg_.feature_dim)
        throw std::invalid_argument("graph feature width differs from the encoder input");
    int h = tape.constant(obs.graph.features);
    for (const RelGnnLayer& layer : gnn_) h = layer.forward(tape, h, obs.graph);
    return mean_pool(tape, h);
}

ActorCritic::ForwardNodes ActorCritic::forward(Tape& tape, const Observation& obs) const {
    const int h = encode(tape, obs);

    ForwardNodes out;
    out.mean = actor_out_.forward(tape, tape.tanh_op(actor_hidden_.forward(tape, h)));
    out.log_std = tape.clip(tape.param(log_std_), cfg_.log_std_min, cfg_.log_std_max);
    out.value = critic_out_.forward(tape, tape.tanh_op(critic_hidden_.forward(tape, h)));
    return out;
}

std::vector<int> ActorCritic::actor_param_ids() const { return actor_ids_; }

std::vector<int> ActorCritic::critic_param_ids() const {
    return {critic_hidden_.w, critic_hidden_.b, critic_out_.w, critic_out_.b};
}

void ActorCritic::clamp_log_std() {
    auto& ls = params_[log_std_].value;
    for (double& v : ls.data) v = std::clamp(v, cfg_.log_std_min, cfg_.log_std_max);
}

double gaussian_log_prob(const std::vector<double>& action, const std::vector<double>& mean,
                         const std::vector<double>& log_std) {
    constexpr double kLogTwoPi = 1.8378770664093453;  // ln(2 pi)
    double lp = 0.0;
    for (size_t i = 0; i < action.size(); ++i) {
        const double z = (action[i] - mean[i]) / std::exp(log_std[i]);
        lp += -0.5 * z * z - log_std[i] - 0.5 * kLogTwoPi;
    }
    return lp;
}

double gaussian_entropy(const std::vector<double>& log_std) {
    constexpr double kLogTwoPiE = 2.8378770664093453;  // ln(2 pi e)
    double h = 0.0;
    for (double ls : log_std) h += ls + 0.5 * kLogTwoPiE;
    return h;
}

}  // namespace pisac
