#pragma once

#include <vector>

#include "pisac/channel.hpp"
#include "pisac/geometry.hpp"

namespace pisac {

/// Per-slot TDMA fractions and transmit powers, one entry per user.
struct Allocation {
    std::vector<double> q;  // slot fractions, q_k >= 0, sum <= 1
    std::vector<double> p;  // transmit powers, 0 <= p_k <= max_user_power, watts

    void validate(double max_user_power) const;  // throws std::invalid_argument
};

/// Which reading of the sensing-SNR amplitude to use. The physically
/// consistent per-antenna amplitude is sqrt(p_k / M); the literal formula
/// places p_k / M inside the magnitude instead. Both are supported.
enum class SnrAmplitudeMode { Sqrt, AsWritten };

const char* to_string(SnrAmplitudeMode mode);

/// TDMA share of the slot times the log capacity at SNR
/// p_k |gain|^2 / (M q_k noise). Zero share or zero power yields zero rate.
double comm_rate(double q_k, double p_k, const ComplexGain& gain, int n_antennas,
                 double noise_power);

/// Target-received SNR: sum over users of the target-path signal power over
/// the user-path signal power plus noise, with per-user amplitudes set by
/// `mode`.
double sensing_snr(int target, const AntennaLayout& layout,
                   const std::vector<Waveguide>& waveguides, const RfConstants& rf,
                   const Allocation& allocation, const Scenario& scenario,
                   SnrAmplitudeMode mode);

/// Energy spent in one slot: sum of p_k * q_k.
double slot_energy(const Allocation& allocation);

/// Feasibility of one slot against problem constraints (a)-(e). `violation`
/// is the shortfall/excess in the constraint's native unit, 0 when satisfied.
struct ConstraintCheck {
    bool ok = true;
    double violation = 0.0;
};

struct FeasibilityReport {
    ConstraintCheck sensing;       // (a) every target SNR >= threshold (linear)
    ConstraintCheck time_share;    // (b) sum of q <= 1 (fraction)
    ConstraintCheck energy;        // (c) cumulative energy <= budget (watt-slots)
    ConstraintCheck power;         // (d) 0 <= p_k <= max (watts)
    ConstraintCheck spacing;       // (e) same-guide antenna gaps >= min spacing (meters)

    bool all_ok() const {
        return sensing.ok && time_share.ok && energy.ok && power.ok && spacing.ok;
    }
};

FeasibilityReport feasibility_report(const Scenario& scenario, const AntennaLayout& layout,
                                     const Allocation& allocation,
                                     const std::vector<double>& sensing_snrs,
                                     double energy_so_far);

/// Everything the environment needs from one slot evaluation.
struct SlotMetrics {
    std::vector<double> rates;         // bps/Hz per user
    std::vector<double> sensing_snrs;  // linear per target
    double energy = 0.0;               // watts (p*q summed)
    FeasibilityReport feasibility;
};

SlotMetrics evaluate_slot(const Scenario& scenario, const AntennaLayout& layout,
                          const Allocation& allocation, const RfConstants& rf,
                          SnrAmplitudeMode mode, double energy_before);

}  // namespace pisac
