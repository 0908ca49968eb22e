#include "pisac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pisac {
namespace {

// Slack for spacing comparisons. A right-edge shift leaves gaps of exactly
// min_spacing up to one ulp; without the slack a second projection pass would
// "repair" those gaps and the operation would not be idempotent.
constexpr double kSpacingSlack = 1e-12;

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

Waveguide::Waveguide(Vec3 origin_, Vec3 direction_, double length_, Vec3 feed_point_)
    : origin(origin_), direction(direction_), length(length_), feed_point(feed_point_) {
    if (std::abs(direction.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("waveguide direction must be a unit vector");
    if (!(length > 0.0)) throw std::invalid_argument("waveguide length must be positive");
    const double s = (feed_point - origin).dot(direction);
    if (s < -1e-9 || s > length + 1e-9 || distance(feed_point, point_at(s)) > 1e-9)
        throw std::invalid_argument("feed point must lie on the waveguide segment");
}

AntennaLayout AntennaLayout::from_assignments(std::vector<AntennaAssignment> assignments,
                                              const std::vector<Waveguide>& waveguides) {
    AntennaLayout layout;
    layout.assignments = std::move(assignments);
    layout.refresh_positions(waveguides);
    return layout;
}

void AntennaLayout::refresh_positions(const std::vector<Waveguide>& waveguides) {
    positions.resize(assignments.size());
    for (size_t i = 0; i < assignments.size(); ++i) {
        const auto& a = assignments[i];
        if (a.waveguide < 0 || a.waveguide >= static_cast<int>(waveguides.size()))
            throw std::invalid_argument("antenna assigned to unknown waveguide");
        positions[i] = waveguides[static_cast<size_t>(a.waveguide)].point_at(a.s);
    }
}

const char* to_string(DeploymentKind kind) {
    switch (kind) {
        case DeploymentKind::OneD: return "1d";
        case DeploymentKind::TwoD: return "2d";
        case DeploymentKind::ThreeD: return "3d";
    }
    return "?";
}

std::vector<double> project_spacing(std::vector<double> scalars, double min_spacing, double length) {
    if (!(min_spacing > 0.0)) throw std::invalid_argument("min_spacing must be positive");
    for (double s : scalars) check_finite(s, "scalar coordinate");
    const int n = static_cast<int>(scalars.size());
    if (n == 0) return scalars;
    if (static_cast<double>(n - 1) * min_spacing > length)
        throw std::invalid_argument("spacing projection infeasible: (count-1)*min_spacing > length");

    std::vector<int> order(scalars.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scalars[a] < scalars[b]; });

    std::vector<double> v(scalars.size());
    for (int i = 0; i < n; ++i) v[i] = scalars[order[i]];

    v[0] = std::clamp(v[0], 0.0, length);
    for (int i = 1; i < n; ++i)
        if (v[i] - v[i - 1] < min_spacing - kSpacingSlack) v[i] = v[i - 1] + min_spacing;

    if (v[n - 1] > length) {
        v[n - 1] = length;
        for (int i = n - 2; i >= 0; --i)
            if (v[i + 1] - v[i] < min_spacing - kSpacingSlack) v[i] = v[i + 1] - min_spacing;
        if (v[0] < 0.0) v[0] = 0.0;  // only reachable when the fit is exact
    }

    std::vector<double> out(scalars.size());
    for (int i = 0; i < n; ++i) out[order[i]] = v[i];
    return out;
}

Deployment make_deployment(DeploymentKind kind, int n_antennas, double area, double height,
                           double min_spacing, double riser_length) {
    if (n_antennas < 1) throw std::invalid_argument("need at least one antenna");
    if (!(area > 0.0) || !(height >= 0.0)) throw std::invalid_argument("bad deployment extents");
    if (!(min_spacing > 0.0)) throw std::invalid_argument("min_spacing must be positive");
    if (riser_length <= 0.0) riser_length = area;

    // The deployments span 1/2/3 spatial dimensions: a single riser at the
    // area center, three risers forming the x-z plane, or three axis-aligned
    // segments from a common origin. Risers start at the elevation d.
    const Vec3 up{0.0, 0.0, 1.0};
    std::vector<Waveguide> guides;
    switch (kind) {
        case DeploymentKind::OneD: {
            const Vec3 base{area / 2.0, 0.0, height};
            guides.emplace_back(base, up, riser_length, base);
            break;
        }
        case DeploymentKind::TwoD: {
            for (double x : {0.0, area / 2.0, area}) {
                const Vec3 base{x, 0.0, height};
                guides.emplace_back(base, up, riser_length, base);
            }
            break;
        }
        case DeploymentKind::ThreeD: {
            const Vec3 base{0.0, 0.0, height};
            guides.emplace_back(base, Vec3{1.0, 0.0, 0.0}, area, base);
            guides.emplace_back(base, Vec3{0.0, 1.0, 0.0}, area, base);
            guides.emplace_back(base, up, area, base);
            break;
        }
    }

    // Even split; the remainder goes to the earlier guides (x, then y).
    const int g = static_cast<int>(guides.size());
    std::vector<int> counts(guides.size(), n_antennas / g);
    for (int i = 0; i < n_antennas % g; ++i) counts[static_cast<size_t>(i)] += 1;

    std::vector<AntennaAssignment> assignments;
    assignments.reserve(static_cast<size_t>(n_antennas));
    for (int w = 0; w < g; ++w) {
        const int m = counts[static_cast<size_t>(w)];
        if (m == 0) continue;
        const double len = guides[static_cast<size_t>(w)].length;
        if (static_cast<double>(m) * min_spacing > len)
            throw std::invalid_argument("infeasible geometry: " + std::to_string(m) +
                                        " antennas with spacing " + std::to_string(min_spacing) +
                                        " m do not fit on a " + std::to_string(len) + " m waveguide");
        // A lone antenna sits at the feed end; larger groups spread over the
        // interior so guides sharing an origin never stack antennas on it.
        std::vector<double> scalars(static_cast<size_t>(m));
        if (m > 1)
            for (int i = 0; i < m; ++i) scalars[static_cast<size_t>(i)] = len * (i + 1) / (m + 1);
        scalars = project_spacing(std::move(scalars), min_spacing, len);
        for (double s : scalars) assignments.push_back({w, s});
    }

    Deployment dep;
    dep.layout = AntennaLayout::from_assignments(std::move(assignments), guides);
    dep.waveguides = std::move(guides);
    return dep;
}

double min_pairwise_distance(const AntennaLayout& layout) {
    const size_t n = layout.positions.size();
    if (n < 2) throw std::invalid_argument("min_pairwise_distance needs at least 2 antennas");
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            best = std::min(best, distance(layout.positions[i], layout.positions[j]));
    return best;
}

void Scenario::validate() const {
    for (const Vec3& u : users)
        if (u.z != 0.0) throw std::invalid_argument("users must lie in the z=0 plane");
    for (const Vec3& t : targets)
        if (t.z != 0.0) throw std::invalid_argument("targets must lie in the z=0 plane");
    if (!(carrier_freq_hz > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
    if (!(n_eff > 0.0)) throw std::invalid_argument("n_eff must be positive");
    if (!(min_spacing > 0.0)) throw std::invalid_argument("min_spacing must be positive");
    if (!(max_user_power > 0.0)) throw std::invalid_argument("max_user_power must be positive");
    if (!(energy_budget > 0.0)) throw std::invalid_argument("energy budget must be positive");
    if (!(noise_power > 0.0)) throw std::invalid_argument("noise power must be positive");
    if (!(min_sensing_snr > 0.0)) throw std::invalid_argument("min sensing SNR must be positive");
    if (slots < 1) throw std::invalid_argument("slot count must be at least 1");
}

}  // namespace pisac
