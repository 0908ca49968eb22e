#pragma once

#include <complex>
#include <vector>

#include "pisac/geometry.hpp"
#include "pisac/vec3.hpp"

namespace pisac {

using ComplexGain = std::complex<double>;

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

/// Carrier-derived constants. The guided wavelength drives in-waveguide phase
/// shifts; alpha is the spherical-wave amplitude constant c / (4 pi f_c).
struct RfConstants {
    double wavelength = 0.0;         // meters
    double guided_wavelength = 0.0;  // wavelength / n_eff
    double alpha = 0.0;              // meters

    RfConstants(double carrier_freq_hz, double n_eff);
};

/// In-guide phase accumulated between the feed point and an antenna:
/// 2 pi |feed - antenna| / guided_wavelength, reduced into [0, 2 pi).
double phase_shift(const Vec3& feed, const Vec3& antenna, double guided_wavelength);

/// Near-field spherical-wave coefficient between a terminal (user or target)
/// and one antenna: alpha * exp(-j 2 pi d / wavelength) / d.
/// Throws std::invalid_argument when terminal and antenna coincide.
ComplexGain channel_coeff(const Vec3& terminal, const Vec3& antenna, const RfConstants& rf);

/// Coherent sum over every antenna of channel coefficient times the feed
/// phase factor exp(-j theta_n). This is the quantity whose squared magnitude
/// drives both the data rate and the sensing SNR.
ComplexGain effective_gain(const Vec3& terminal, const AntennaLayout& layout,
                           const std::vector<Waveguide>& waveguides, const RfConstants& rf);

}  // namespace pisac
