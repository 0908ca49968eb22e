#pragma once

#include <cstdint>
#include <vector>

#include "pisac/vec3.hpp"

namespace pisac {

/// A straight dielectric waveguide segment. Antennas sit at scalar
/// coordinates s in [0, length] along it; the feed point is where the signal
/// enters and anchors the in-guide phase shift of every antenna on it.
struct Waveguide {
    Vec3 origin;
    Vec3 direction;  // unit
    double length = 0.0;
    Vec3 feed_point;

    Waveguide(Vec3 origin_, Vec3 direction_, double length_, Vec3 feed_point_);

    Vec3 point_at(double s) const { return origin + s * direction; }
};

struct AntennaAssignment {
    int waveguide = 0;  // index into the deployment's waveguide list
    double s = 0.0;     // scalar coordinate in [0, length], meters
};

/// Per-antenna waveguide assignments plus the derived 3D positions.
/// positions[i] is always origin + s_i * direction of antenna i's waveguide;
/// call refresh_positions after mutating scalars.
struct AntennaLayout {
    std::vector<AntennaAssignment> assignments;
    std::vector<Vec3> positions;

    static AntennaLayout from_assignments(std::vector<AntennaAssignment> assignments,
                                          const std::vector<Waveguide>& waveguides);
    void refresh_positions(const std::vector<Waveguide>& waveguides);
    int count() const { return static_cast<int>(assignments.size()); }
};

enum class DeploymentKind { OneD, TwoD, ThreeD };

const char* to_string(DeploymentKind kind);

struct Deployment {
    std::vector<Waveguide> waveguides;
    AntennaLayout layout;
};

/// Builds the three reference deployment geometries over a square service
/// area of side `area` meters, with waveguides elevated `height` meters above
/// the user/target plane:
///   1D: one vertical riser at (area/2, 0), rising from z = height
///   2D: three vertical risers at x = 0, area/2, area (y = 0), rising from height
///   3D: three mutually perpendicular segments from (0, 0, height) along +x/+y/+z
/// Antennas are split across waveguides as evenly as possible (remainders go
/// to earlier waveguides: x first, then y), evenly spaced along each guide,
/// then spacing-projected so every same-guide gap is >= min_spacing.
/// `riser_length` bounds the 1D/2D risers (0 means `area`, the length the 3D
/// axes always use). Throws std::invalid_argument when a guide would need
/// count * min_spacing beyond its length.
Deployment make_deployment(DeploymentKind kind, int n_antennas, double area, double height,
                           double min_spacing, double riser_length = 0.0);

/// Order-preserving projection of scalar coordinates onto the feasible set
/// {gap >= min_spacing, values in [0, length]}: stable-sort, sweep up fixing
/// gaps, then shift the tail block left if it overran the right edge.
/// Idempotent; throws std::invalid_argument when (count-1)*min_spacing >
/// length.
std::vector<double> project_spacing(std::vector<double> scalars, double min_spacing, double length);

/// Minimum Euclidean distance over all antenna pairs, cross-waveguide pairs
/// included. Throws std::invalid_argument with fewer than 2 antennas.
double min_pairwise_distance(const AntennaLayout& layout);

/// Immutable world description for one episode: terminals, waveguides, RF
/// constants and budgets. Users/targets live in the z = 0 plane.
struct Scenario {
    std::vector<Vec3> users;
    std::vector<Vec3> targets;
    std::vector<Waveguide> waveguides;

    double carrier_freq_hz = 0.0;
    double n_eff = 1.0;
    double min_spacing = 0.0;        // constraint (8e), meters, per waveguide
    double max_user_power = 0.0;     // constraint (8d) upper bound, watts
    double energy_budget = 0.0;      // constraint (8c), sum of p*q over the episode
    double noise_power = 0.0;        // watts
    double min_sensing_snr = 0.0;    // constraint (8a) threshold, linear
    int slots = 0;                   // episode length T

    void validate() const;  // throws std::invalid_argument on violations
};

}  // namespace pisac
