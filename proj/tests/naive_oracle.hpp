#pragma once

// Test-only oracle: the rate and sensing-SNR formulas re-derived from scratch
// with plain arrays and combined-angle trigonometry. Shares no code with the
// library path (which goes through Waveguide/AntennaLayout, std::complex and
// per-factor polar multiplies).

#include <array>
#include <cmath>
#include <vector>

namespace oracle {

using P3 = std::array<double, 3>;

struct Instance {
    double carrier_freq_hz;
    double n_eff;
    std::vector<P3> antennas;
    std::vector<P3> feeds;  // one per antenna
    std::vector<P3> users;
    std::vector<P3> targets;
    std::vector<double> q;
    std::vector<double> p;
    double noise_power;
    bool sqrt_amplitude;  // false -> literal p/M inside the magnitude
};

struct Result {
    std::vector<double> rates;
    std::vector<double> snrs;
};

inline double dist(const P3& a, const P3& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// |sum_n (alpha/d_n) e^{-j(2 pi d_n / lambda + theta_n)}|^2 for one terminal,
// accumulated as cos/sin of the combined angle (whole turns dropped first).
inline double gain_squared(const Instance& in, const P3& terminal) {
    const double c = 2.99792458e8;
    const double lambda = c / in.carrier_freq_hz;
    const double lambda_g = lambda / in.n_eff;
    const double alpha = c / (4.0 * M_PI * in.carrier_freq_hz);
    double re = 0.0;
    double im = 0.0;
    for (size_t n = 0; n < in.antennas.size(); ++n) {
        const double d = dist(terminal, in.antennas[n]);
        const double s = dist(in.feeds[n], in.antennas[n]);
        const double angle =
            2.0 * M_PI * std::fmod(d / lambda, 1.0) + 2.0 * M_PI * std::fmod(s / lambda_g, 1.0);
        re += alpha / d * std::cos(-angle);
        im += alpha / d * std::sin(-angle);
    }
    return re * re + im * im;
}

inline Result evaluate(const Instance& in) {
    const double m = static_cast<double>(in.antennas.size());
    Result out;

    std::vector<double> user_g2(in.users.size());
    for (size_t k = 0; k < in.users.size(); ++k) user_g2[k] = gain_squared(in, in.users[k]);

    for (size_t k = 0; k < in.users.size(); ++k) {
        const double qk = in.q[k];
        const double pk = in.p[k];
        double rate = 0.0;
        if (qk > 0.0 && pk > 0.0)
            rate = qk * std::log2(1.0 + pk * user_g2[k] / (m * qk * in.noise_power));
        out.rates.push_back(rate);
    }

    for (const P3& target : in.targets) {
        const double target_g2 = gain_squared(in, target);
        double snr = 0.0;
        for (size_t k = 0; k < in.users.size(); ++k) {
            const double amp = in.sqrt_amplitude ? in.p[k] / m : (in.p[k] / m) * (in.p[k] / m);
            snr += amp * target_g2 / (amp * user_g2[k] + in.noise_power);
        }
        out.snrs.push_back(snr);
    }
    return out;
}

}  // namespace oracle
