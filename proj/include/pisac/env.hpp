#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pisac/channel.hpp"
#include "pisac/geometry.hpp"
#include "pisac/graph.hpp"
#include "pisac/metrics.hpp"
#include "pisac/rng.hpp"

namespace pisac {

/// Raw policy output: n_antennas displacement logits, n_users TDMA logits,
/// n_users power logits, in that order.
using RawAction = std::vector<double>;

struct ProjectedAction {
    std::vector<double> displacements;  // meters, in [-step_max, step_max]
    Allocation allocation;              // q sums to < 1, p in [0, max_user_power]
};

struct ActionLimits {
    int n_antennas = 0;
    int n_users = 0;
    double step_max = 0.0;        // meters per slot
    double max_user_power = 0.0;  // watts

    int raw_dim() const { return n_antennas + 2 * n_users; }
};

/// Squashes an unconstrained raw vector onto the feasible action set:
/// tanh-bounded displacements, softmax over TDMA logits plus a zero "idle"
/// logit (the idle share is dropped, so the q sum stays strictly below 1),
/// and logistic-bounded powers. Throws std::invalid_argument on non-finite
/// input or a size mismatch.
ProjectedAction project_action(const RawAction& raw, const ActionLimits& limits);

/// Reward terms of one step. `total` always reconstructs exactly as
/// sum_rate - sensing_penalty - phys_penalty - energy_penalty, where the
/// penalty fields already carry their weights.
struct RewardBreakdown {
    double sum_rate = 0.0;
    double sensing_penalty = 0.0;
    double phys_penalty = 0.0;
    double energy_penalty = 0.0;
    double total = 0.0;
};

struct RewardWeights {
    double sensing = 1.0;  // per unit of linear-SNR shortfall
    double phys = 1.0;     // per meter of attempted same-guide spacing violation
    double energy = 10.0;  // per watt-slot of budget overrun, terminal step only
};

RewardBreakdown compute_reward(const std::vector<double>& rates,
                               const std::vector<double>& sensing_snrs, double min_sensing_snr,
                               double attempted_spacing_violation, double energy_overrun,
                               const RewardWeights& weights);

/// How user/target positions are drawn at reset. Targets always land near
/// the area center (uniform jitter box); users either sit at uniform angles
/// on a ring around the first target or spread uniformly over the area.
struct PlacementSpec {
    enum class Kind { Ring, Uniform };
    Kind kind = Kind::Ring;
    double ring_radius = 10.0;   // meters
    double target_jitter = 2.0;  // meters, +- around center, clipped to the area
    // When set, positions are fixed and the generator is bypassed.
    std::optional<std::vector<Vec3>> fixed_users;
    std::optional<std::vector<Vec3>> fixed_targets;
};

/// Immutable description of the world from which episodes are generated;
/// positions are episode-specific and live in the Scenario built at reset.
struct WorldSpec {
    int n_users = 6;
    int n_targets = 1;
    int n_antennas = 6;
    double area = 50.0;    // meters
    double height = 10.0;  // meters
    double riser_length = 0.0;  // 1D/2D riser extent, 0 -> area
    double carrier_freq_hz = 28e9;
    double n_eff = 1.4;
    double min_spacing = 0.0;  // 0 -> half the free-space wavelength
    double max_user_power = 0.0;
    double energy_budget = 0.0;
    double noise_power = 1e-12;
    double min_sensing_snr = 10.0;  // linear
    int slots = 10;
    DeploymentKind deployment = DeploymentKind::ThreeD;
    PlacementSpec placement;
    SnrAmplitudeMode snr_mode = SnrAmplitudeMode::Sqrt;
    double step_max = 0.0;        // 0 -> one free-space wavelength
    double position_scale = 0.0;  // 0 -> area
    bool context_features = false;
    RewardWeights reward_weights;

    double resolved_min_spacing() const;
    double resolved_step_max() const;
    double resolved_position_scale() const;
};

struct StepResult {
    RewardBreakdown reward;
    bool done = false;
    SlotMetrics metrics;
};

/// The episodic MDP. Single-owner mutable state; all randomness flows from
/// the seed handed to reset().
class Environment {
  public:
    explicit Environment(WorldSpec spec);

    const HeteroGraph& reset(uint64_t seed);
    StepResult step(const RawAction& raw);  // throws std::logic_error once done

    const HeteroGraph& graph() const { return graph_; }
    const Scenario& scenario() const { return scenario_; }
    const AntennaLayout& layout() const { return layout_; }
    const Allocation& allocation() const { return allocation_; }
    const WorldSpec& spec() const { return spec_; }
    const RfConstants& rf() const { return rf_; }
    ActionLimits action_limits() const;

    int slot() const { return slot_; }
    double energy_used() const { return energy_used_; }
    bool done() const { return done_; }

    /// Positions of every node plus current allocation, normalized; the
    /// graph-free observation used by the dense baseline.
    std::vector<double> flat_state() const;

  private:
    void rebuild_graph();

    WorldSpec spec_;
    RfConstants rf_;
    Scenario scenario_;
    AntennaLayout layout_;
    Allocation allocation_;
    HeteroGraph graph_;
    GraphContext context_;
    int slot_ = 0;
    double energy_used_ = 0.0;
    bool done_ = true;  // requires reset() before the first step
};

}  // namespace pisac
