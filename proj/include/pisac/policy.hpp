#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pisac/graph.hpp"
#include "pisac/nn.hpp"
#include "pisac/tape.hpp"

namespace pisac {

enum class AlgoKind { Hgrl, Grl, MlpA2c, Random };

const char* to_string(AlgoKind kind);
AlgoKind algo_from_string(const std::string& name);  // throws on unknown names

/// What a policy sees. Graph-based encoders read `graph`; the dense baseline
/// reads `flat`.
struct Observation {
    HeteroGraph graph;
    std::vector<double> flat;
};

struct PolicyConfig {
    AlgoKind kind = AlgoKind::Hgrl;
    int feature_dim = 6;   // graph node feature width
    int flat_dim = 0;      // flattened state width (MlpA2c)
    int action_dim = 0;    // n_antennas + 2 * n_users
    int hidden = 64;
    int gnn_layers = 2;
    double log_std_init = -0.6931471805599453;  // ln(0.5)
    double log_std_min = -5.0;
    double log_std_max = 1.0;
};

/// Shared encoder feeding a Gaussian actor head and a value head. The
/// log-std is a state-independent learnable row vector.
class ActorCritic {
  public:
    ActorCritic(PolicyConfig cfg, uint64_t seed);

    struct ForwardNodes {
        int mean = -1;     // 1 x action_dim
        int log_std = -1;  // 1 x action_dim, already clamped
        int value = -1;    // 1 x 1
    };
    ForwardNodes forward(Tape& tape, const Observation& obs) const;

    /// ids of encoder + actor head + log_std, and of the value head;
    /// the two optimizer groups.
    std::vector<int> actor_param_ids() const;
    std::vector<int> critic_param_ids() const;

    /// Keeps the stored log-std inside its clamp range after an update.
    void clamp_log_std();

    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    const PolicyConfig& config() const { return cfg_; }

  private:
    int encode(Tape& tape, const Observation& obs) const;  // -> 1 x hidden

    PolicyConfig cfg_;
    ParamStore params_;
    std::vector<RelGnnLayer> gnn_;
    std::vector<Dense> mlp_;
    Dense actor_hidden_;
    Dense actor_out_;
    Dense critic_hidden_;
    Dense critic_out_;
    int log_std_ = -1;
    std::vector<int> actor_ids_;
};

/// Analytic diagonal-Gaussian log-density of `action` at (mean, exp(log_std)).
double gaussian_log_prob(const std::vector<double>& action, const std::vector<double>& mean,
                         const std::vector<double>& log_std);

/// Entropy of the diagonal Gaussian: sum(log_std) + dim/2 * ln(2 pi e).
double gaussian_entropy(const std::vector<double>& log_std);

}  // namespace pisac
