#include "pisac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pisac {

void Allocation::validate(double max_user_power) const {
    if (q.size() != p.size()) throw std::invalid_argument("allocation q/p size mismatch");
    double total = 0.0;
    for (double qk : q) {
        if (!(qk >= 0.0)) throw std::invalid_argument("slot fractions must be nonnegative");
        total += qk;
    }
    if (total > 1.0) throw std::invalid_argument("slot fractions must sum to at most 1");
    for (double pk : p)
        if (!(pk >= 0.0) || pk > max_user_power)
            throw std::invalid_argument("powers must lie in [0, max_user_power]");
}

const char* to_string(SnrAmplitudeMode mode) {
    return mode == SnrAmplitudeMode::Sqrt ? "sqrt" : "as_written";
}

double comm_rate(double q_k, double p_k, const ComplexGain& gain, int n_antennas,
                 double noise_power) {
    if (!(q_k >= 0.0) || !(p_k >= 0.0)) throw std::invalid_argument("q and p must be nonnegative");
    if (!(noise_power > 0.0)) throw std::invalid_argument("noise power must be positive");
    if (n_antennas < 1) throw std::invalid_argument("need at least one antenna");
    if (q_k == 0.0 || p_k == 0.0) return 0.0;
    const double g2 = std::norm(gain);
    const double snr = p_k * g2 / (n_antennas * q_k * noise_power);
    if (!std::isfinite(snr))  // q below ~1e-290: evaluate the q*log2 limit directly
        return q_k * (std::log2(p_k * g2 / (n_antennas * noise_power)) - std::log2(q_k));
    return q_k * std::log2(1.0 + snr);
}

double sensing_snr(int target, const AntennaLayout& layout,
                   const std::vector<Waveguide>& waveguides, const RfConstants& rf,
                   const Allocation& allocation, const Scenario& scenario,
                   SnrAmplitudeMode mode) {
    if (target < 0 || target >= static_cast<int>(scenario.targets.size()))
        throw std::invalid_argument("target index out of range");
    const int n_antennas = layout.count();
    const double target_g2 =
        std::norm(effective_gain(scenario.targets[static_cast<size_t>(target)], layout, waveguides, rf));

    double snr = 0.0;
    for (size_t k = 0; k < scenario.users.size(); ++k) {
        const double user_g2 = std::norm(effective_gain(scenario.users[k], layout, waveguides, rf));
        const double per_antenna = allocation.p[k] / n_antennas;
        const double amp2 = mode == SnrAmplitudeMode::Sqrt ? per_antenna : per_antenna * per_antenna;
        snr += amp2 * target_g2 / (amp2 * user_g2 + scenario.noise_power);
    }
    return snr;
}

double slot_energy(const Allocation& allocation) {
    double e = 0.0;
    for (size_t k = 0; k < allocation.q.size(); ++k) e += allocation.p[k] * allocation.q[k];
    return e;
}

FeasibilityReport feasibility_report(const Scenario& scenario, const AntennaLayout& layout,
                                     const Allocation& allocation,
                                     const std::vector<double>& sensing_snrs,
                                     double energy_so_far) {
    FeasibilityReport report;

    for (double snr : sensing_snrs)
        report.sensing.violation =
            std::max(report.sensing.violation, std::max(0.0, scenario.min_sensing_snr - snr));
    report.sensing.ok = report.sensing.violation == 0.0;

    double total_q = 0.0;
    for (double qk : allocation.q) total_q += qk;
    report.time_share.violation = std::max(0.0, total_q - 1.0);
    report.time_share.ok = report.time_share.violation == 0.0;

    report.energy.violation = std::max(0.0, energy_so_far - scenario.energy_budget);
    report.energy.ok = report.energy.violation == 0.0;

    for (double pk : allocation.p)
        report.power.violation = std::max(
            report.power.violation, std::max(0.0, std::max(pk - scenario.max_user_power, -pk)));
    report.power.ok = report.power.violation == 0.0;

    std::map<int, std::vector<double>> per_guide;
    for (const auto& a : layout.assignments) per_guide[a.waveguide].push_back(a.s);
    for (auto& [guide, scalars] : per_guide) {
        std::sort(scalars.begin(), scalars.end());
        for (size_t i = 1; i < scalars.size(); ++i)
            report.spacing.violation =
                std::max(report.spacing.violation,
                         std::max(0.0, scenario.min_spacing - (scalars[i] - scalars[i - 1])));
    }
    report.spacing.ok = report.spacing.violation == 0.0;

    return report;
}

SlotMetrics evaluate_slot(const Scenario& scenario, const AntennaLayout& layout,
                          const Allocation& allocation, const RfConstants& rf,
                          SnrAmplitudeMode mode, double energy_before) {
    SlotMetrics m;
    const int n_antennas = layout.count();
    m.rates.resize(scenario.users.size());
    for (size_t k = 0; k < scenario.users.size(); ++k) {
        const ComplexGain g = effective_gain(scenario.users[k], layout, scenario.waveguides, rf);
        m.rates[k] = comm_rate(allocation.q[k], allocation.p[k], g, n_antennas, scenario.noise_power);
    }
    m.sensing_snrs.resize(scenario.targets.size());
    for (size_t l = 0; l < scenario.targets.size(); ++l)
        m.sensing_snrs[l] = sensing_snr(static_cast<int>(l), layout, scenario.waveguides, rf,
                                        allocation, scenario, mode);
    m.energy = slot_energy(allocation);
    m.feasibility =
        feasibility_report(scenario, layout, allocation, m.sensing_snrs, energy_before + m.energy);
    return m;
}

}  // namespace pisac
