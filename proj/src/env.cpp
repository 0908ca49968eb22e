#include "pisac/env.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace pisac {
namespace {

// TDMA logits are clamped here before the softmax. This keeps the idle share
// comfortably above summation rounding, so the floating-point sum of q is
// strictly below 1 for any raw input.
constexpr double kLogitClamp = 30.0;

double stable_logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

ProjectedAction project_action(const RawAction& raw, const ActionLimits& limits) {
    if (static_cast<int>(raw.size()) != limits.raw_dim())
        throw std::invalid_argument("raw action has wrong dimension");
    for (double v : raw)
        if (!std::isfinite(v)) throw std::invalid_argument("raw action must be finite");

    ProjectedAction out;
    out.displacements.resize(static_cast<size_t>(limits.n_antennas));
    for (int i = 0; i < limits.n_antennas; ++i)
        out.displacements[static_cast<size_t>(i)] = limits.step_max * std::tanh(raw[static_cast<size_t>(i)]);

    const int qoff = limits.n_antennas;
    double max_logit = 0.0;  // the idle logit
    for (int k = 0; k < limits.n_users; ++k)
        max_logit = std::max(max_logit,
                             std::clamp(raw[static_cast<size_t>(qoff + k)], -kLogitClamp, kLogitClamp));
    double denom = std::exp(-max_logit);  // idle term
    std::vector<double> num(static_cast<size_t>(limits.n_users));
    for (int k = 0; k < limits.n_users; ++k) {
        const double logit =
            std::clamp(raw[static_cast<size_t>(qoff + k)], -kLogitClamp, kLogitClamp);
        num[static_cast<size_t>(k)] = std::exp(logit - max_logit);
        denom += num[static_cast<size_t>(k)];
    }
    out.allocation.q.resize(static_cast<size_t>(limits.n_users));
    for (int k = 0; k < limits.n_users; ++k)
        out.allocation.q[static_cast<size_t>(k)] = num[static_cast<size_t>(k)] / denom;

    const int poff = limits.n_antennas + limits.n_users;
    out.allocation.p.resize(static_cast<size_t>(limits.n_users));
    for (int k = 0; k < limits.n_users; ++k)
        out.allocation.p[static_cast<size_t>(k)] =
            limits.max_user_power * stable_logistic(raw[static_cast<size_t>(poff + k)]);

    return out;
}

RewardBreakdown compute_reward(const std::vector<double>& rates,
                               const std::vector<double>& sensing_snrs, double min_sensing_snr,
                               double attempted_spacing_violation, double energy_overrun,
                               const RewardWeights& weights) {
    RewardBreakdown r;
    for (double rate : rates) r.sum_rate += rate;
    double shortfall = 0.0;
    for (double snr : sensing_snrs) shortfall += std::max(0.0, min_sensing_snr - snr);
    r.sensing_penalty = weights.sensing * shortfall;
    r.phys_penalty = weights.phys * attempted_spacing_violation;
    r.energy_penalty = weights.energy * energy_overrun;
    r.total = r.sum_rate - r.sensing_penalty - r.phys_penalty - r.energy_penalty;
    return r;
}

double WorldSpec::resolved_min_spacing() const {
    if (min_spacing > 0.0) return min_spacing;
    return kSpeedOfLight / carrier_freq_hz / 2.0;
}

double WorldSpec::resolved_step_max() const {
    if (step_max > 0.0) return step_max;
    return kSpeedOfLight / carrier_freq_hz;
}

double WorldSpec::resolved_position_scale() const {
    return position_scale > 0.0 ? position_scale : area;
}

Environment::Environment(WorldSpec spec) : spec_(std::move(spec)), rf_(spec_.carrier_freq_hz, spec_.n_eff) {
    if (spec_.n_users < 1 || spec_.n_targets < 1 || spec_.n_antennas < 1)
        throw std::invalid_argument("need at least one user, target and antenna");
    if (!(spec_.max_user_power > 0.0)) throw std::invalid_argument("max_user_power must be positive");
    if (!(spec_.energy_budget > 0.0)) throw std::invalid_argument("energy budget must be positive");
}

ActionLimits Environment::action_limits() const {
    return {spec_.n_antennas, spec_.n_users, spec_.resolved_step_max(), spec_.max_user_power};
}

const HeteroGraph& Environment::reset(uint64_t seed) {
    Rng rng(seed);

    Deployment dep = make_deployment(spec_.deployment, spec_.n_antennas, spec_.area, spec_.height,
                                     spec_.resolved_min_spacing(), spec_.riser_length);
    layout_ = std::move(dep.layout);

    scenario_ = Scenario{};
    scenario_.waveguides = std::move(dep.waveguides);
    scenario_.carrier_freq_hz = spec_.carrier_freq_hz;
    scenario_.n_eff = spec_.n_eff;
    scenario_.min_spacing = spec_.resolved_min_spacing();
    scenario_.max_user_power = spec_.max_user_power;
    scenario_.energy_budget = spec_.energy_budget;
    scenario_.noise_power = spec_.noise_power;
    scenario_.min_sensing_snr = spec_.min_sensing_snr;
    scenario_.slots = spec_.slots;

    const auto& placement = spec_.placement;
    if (placement.fixed_targets) {
        scenario_.targets = *placement.fixed_targets;
    } else {
        const double c = spec_.area / 2.0;
        for (int l = 0; l < spec_.n_targets; ++l) {
            const double x = std::clamp(c + rng.uniform(-placement.target_jitter, placement.target_jitter),
                                        0.0, spec_.area);
            const double y = std::clamp(c + rng.uniform(-placement.target_jitter, placement.target_jitter),
                                        0.0, spec_.area);
            scenario_.targets.push_back({x, y, 0.0});
        }
    }
    if (placement.fixed_users) {
        scenario_.users = *placement.fixed_users;
    } else if (placement.kind == PlacementSpec::Kind::Uniform) {
        for (int k = 0; k < spec_.n_users; ++k)
            scenario_.users.push_back(
                {rng.uniform(0.0, spec_.area), rng.uniform(0.0, spec_.area), 0.0});
    } else {
        // Users on a circular ring around the first target.
        const Vec3 center = scenario_.targets.front();
        for (int k = 0; k < spec_.n_users; ++k) {
            const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
            scenario_.users.push_back({center.x + placement.ring_radius * std::cos(angle),
                                       center.y + placement.ring_radius * std::sin(angle), 0.0});
        }
    }
    scenario_.validate();

    allocation_.q.assign(static_cast<size_t>(spec_.n_users), 0.0);
    allocation_.p.assign(static_cast<size_t>(spec_.n_users), 0.0);
    context_.user_rates.assign(static_cast<size_t>(spec_.n_users), 0.0);
    context_.target_snrs.assign(static_cast<size_t>(spec_.n_targets), 0.0);
    slot_ = 0;
    energy_used_ = 0.0;
    done_ = false;
    rebuild_graph();
    return graph_;
}

StepResult Environment::step(const RawAction& raw) {
    if (done_) throw std::logic_error("step() called on a finished episode");

    const ProjectedAction action = project_action(raw, action_limits());

    // Desired scalars: displacement along each antenna's own guide, clamped
    // to the segment. The spacing violation they would cause is the
    // pre-projection penalty signal; the projection then enforces (8e).
    std::map<int, std::vector<size_t>> per_guide;
    for (size_t i = 0; i < layout_.assignments.size(); ++i) {
        auto& a = layout_.assignments[i];
        const double len = scenario_.waveguides[static_cast<size_t>(a.waveguide)].length;
        a.s = std::clamp(a.s + action.displacements[i], 0.0, len);
        per_guide[a.waveguide].push_back(i);
    }
    double attempted_violation = 0.0;
    for (auto& [guide, idx] : per_guide) {
        std::vector<double> scalars;
        scalars.reserve(idx.size());
        for (size_t i : idx) scalars.push_back(layout_.assignments[i].s);
        std::vector<double> sorted = scalars;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 1; i < sorted.size(); ++i)
            attempted_violation += std::max(0.0, scenario_.min_spacing - (sorted[i] - sorted[i - 1]));
        scalars = project_spacing(std::move(scalars),
                                  scenario_.min_spacing,
                                  scenario_.waveguides[static_cast<size_t>(guide)].length);
        for (size_t j = 0; j < idx.size(); ++j) layout_.assignments[idx[j]].s = scalars[j];
    }
    layout_.refresh_positions(scenario_.waveguides);
    allocation_ = action.allocation;

    StepResult result;
    result.metrics =
        evaluate_slot(scenario_, layout_, allocation_, rf_, spec_.snr_mode, energy_used_);
    energy_used_ += result.metrics.energy;
    slot_ += 1;

    const bool budget_breached = energy_used_ > scenario_.energy_budget;
    done_ = slot_ >= scenario_.slots || budget_breached;
    const double overrun = budget_breached ? energy_used_ - scenario_.energy_budget : 0.0;

    result.reward = compute_reward(result.metrics.rates, result.metrics.sensing_snrs,
                                   scenario_.min_sensing_snr, attempted_violation, overrun,
                                   spec_.reward_weights);
    result.done = done_;

    context_.user_rates = result.metrics.rates;
    context_.target_snrs = result.metrics.sensing_snrs;
    rebuild_graph();
    return result;
}

void Environment::rebuild_graph() {
    graph_ = build_graph(scenario_, layout_, spec_.resolved_position_scale(),
                         spec_.context_features ? &context_ : nullptr);
}

std::vector<double> Environment::flat_state() const {
    const double scale = spec_.resolved_position_scale();
    std::vector<double> s;
    s.reserve(static_cast<size_t>(3 * graph_.node_count() + 2 * spec_.n_users));
    auto push_pos = [&](const Vec3& v) {
        s.push_back(v.x / scale);
        s.push_back(v.y / scale);
        s.push_back(v.z / scale);
    };
    for (const Vec3& p : layout_.positions) push_pos(p);
    for (const Vec3& u : scenario_.users) push_pos(u);
    for (const Vec3& t : scenario_.targets) push_pos(t);
    for (double qk : allocation_.q) s.push_back(qk);
    for (double pk : allocation_.p) s.push_back(pk / spec_.max_user_power);
    return s;
}

}  // namespace pisac
