#include "pisac/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pisac {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 2 pi * frac(ratio): phase of a path of `ratio` wavelengths, already reduced
// into [0, 2 pi). Reducing before the 2 pi multiply keeps precision for paths
// thousands of wavelengths long.
double reduced_phase(double ratio) {
    return kTwoPi * (ratio - std::floor(ratio));
}

}  // namespace

RfConstants::RfConstants(double carrier_freq_hz, double n_eff) {
    if (!(carrier_freq_hz > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
    if (!(n_eff > 0.0)) throw std::invalid_argument("n_eff must be positive");
    wavelength = kSpeedOfLight / carrier_freq_hz;
    guided_wavelength = wavelength / n_eff;
    alpha = kSpeedOfLight / (4.0 * std::numbers::pi * carrier_freq_hz);
}

double phase_shift(const Vec3& feed, const Vec3& antenna, double guided_wavelength) {
    if (!(guided_wavelength > 0.0)) throw std::invalid_argument("guided wavelength must be positive");
    return reduced_phase(distance(feed, antenna) / guided_wavelength);
}

ComplexGain channel_coeff(const Vec3& terminal, const Vec3& antenna, const RfConstants& rf) {
    const double d = distance(terminal, antenna);
    if (d == 0.0) throw std::invalid_argument("singular channel: terminal coincides with antenna");
    return std::polar(rf.alpha / d, -reduced_phase(d / rf.wavelength));
}

ComplexGain effective_gain(const Vec3& terminal, const AntennaLayout& layout,
                           const std::vector<Waveguide>& waveguides, const RfConstants& rf) {
    ComplexGain sum{0.0, 0.0};
    for (size_t i = 0; i < layout.assignments.size(); ++i) {
        const Waveguide& guide = waveguides[static_cast<size_t>(layout.assignments[i].waveguide)];
        const Vec3& pos = layout.positions[i];
        const double theta = phase_shift(guide.feed_point, pos, rf.guided_wavelength);
        sum += channel_coeff(terminal, pos, rf) * std::polar(1.0, -theta);
    }
    return sum;
}

}  // namespace pisac
