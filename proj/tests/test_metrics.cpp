#include <doctest.h>

#include <cmath>
#include <complex>

#include "naive_oracle.hpp"
#include "pisac/metrics.hpp"
#include "pisac/rng.hpp"

using namespace pisac;

namespace {

Scenario simple_scenario() {
    Scenario s;
    s.waveguides = {Waveguide({0, 0, 10}, {1, 0, 0}, 50, {0, 0, 10})};
    s.carrier_freq_hz = 28e9;
    s.n_eff = 1.4;
    s.min_spacing = 0.005;
    s.max_user_power = 0.6;
    s.energy_budget = 1000;
    s.noise_power = 1e-12;
    s.min_sensing_snr = 3.1622776601683795;  // 5 dB
    s.slots = 10;
    return s;
}

}  // namespace

TEST_CASE("comm_rate closed-form cases") {
    const ComplexGain unit{1.0, 0.0};
    CHECK(comm_rate(0.5, 0.0, unit, 6, 1.0) == 0.0);
    CHECK(comm_rate(0.0, 1.0, unit, 6, 1.0) == 0.0);
    // q=0.5, p=1, M=6, sigma2=1, |g|^2=3 -> snr=1 -> rate 0.5
    const ComplexGain g3{std::sqrt(3.0), 0.0};
    CHECK(comm_rate(0.5, 1.0, g3, 6, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(comm_rate(1.0, 1.0, unit, 1, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("comm_rate vanishes as the share goes to zero") {
    const ComplexGain unit{1.0, 0.0};
    CHECK(comm_rate(1e-9, 1.0, unit, 1, 1.0) < 1e-6);
    CHECK(comm_rate(1e-300, 1.0, unit, 1, 1.0) < 1e-290);  // beyond double snr range
    CHECK(std::isfinite(comm_rate(1e-320, 0.5, unit, 2, 1e-12)));
}

TEST_CASE("comm_rate monotonicity in power and gain") {
    Rng rng(31);
    for (int i = 0; i < 300; ++i) {
        const double q = rng.uniform(0.01, 1.0);
        const double p = rng.uniform(0.0, 0.6);
        const double g2 = rng.uniform(1e-12, 1e-6);
        const double sigma2 = rng.uniform(1e-13, 1e-11);
        const ComplexGain g{std::sqrt(g2), 0.0};
        const ComplexGain g_hi{std::sqrt(g2 * 1.5), 0.0};
        CHECK(comm_rate(q, p + 0.01, g, 6, sigma2) >= comm_rate(q, p, g, 6, sigma2));
        CHECK(comm_rate(q, p, g_hi, 6, sigma2) >= comm_rate(q, p, g, 6, sigma2));
    }
}

TEST_CASE("comm_rate snr argument is scale invariant (exact)") {
    Rng rng(37);
    for (int i = 0; i < 100; ++i) {
        const double q = rng.uniform(0.01, 1.0);
        const double p = rng.uniform(0.001, 0.6);
        const double g2 = rng.uniform(1e-12, 1e-6);
        const double sigma2 = rng.uniform(1e-13, 1e-11);
        const ComplexGain g{std::sqrt(g2), 0.0};
        // doubling noise and power leaves p|g|^2/(M q sigma^2) bit-identical
        CHECK(comm_rate(q, 2.0 * p, g, 6, 2.0 * sigma2) == comm_rate(q, p, g, 6, sigma2));
    }
}

TEST_CASE("sensing_snr constructed cases") {
    Scenario s = simple_scenario();
    auto layout = AntennaLayout::from_assignments({{0, 10.0}, {0, 20.0}, {0, 30.0}}, s.waveguides);
    const RfConstants rf(s.carrier_freq_hz, s.n_eff);

    SUBCASE("zero power gives zero snr") {
        s.users = {{25, 25, 0}};
        s.targets = {{30, 20, 0}};
        Allocation alloc{{1.0}, {0.0}};
        CHECK(sensing_snr(0, layout, s.waveguides, rf, alloc, s, SnrAmplitudeMode::Sqrt) == 0.0);
    }

    SUBCASE("target colocated with the single user: S/(S+noise)") {
        s.users = {{25, 25, 0}};
        s.targets = {{25, 25, 0}};
        // pick p so the signal power equals the noise power: snr = 1/2
        const double g2 = std::norm(effective_gain(s.users[0], layout, s.waveguides, rf));
        const double m = 3.0;
        Allocation alloc{{1.0}, {m * s.noise_power / g2}};
        const double snr = sensing_snr(0, layout, s.waveguides, rf, alloc, s, SnrAmplitudeMode::Sqrt);
        CHECK(snr == doctest::Approx(0.5).epsilon(1e-9));

        // and with S = 9 * noise: snr = 0.9
        Allocation alloc9{{1.0}, {9.0 * m * s.noise_power / g2}};
        const double snr9 =
            sensing_snr(0, layout, s.waveguides, rf, alloc9, s, SnrAmplitudeMode::Sqrt);
        CHECK(snr9 == doctest::Approx(0.9).epsilon(1e-9));
    }
}

TEST_CASE("slot_energy") {
    CHECK(slot_energy({{0.5, 0.5}, {2.0, 4.0}}) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(slot_energy({{0.0, 0.0}, {2.0, 4.0}}) == 0.0);
    CHECK(slot_energy({{1.0}, {0.6}}) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("feasibility_report per-constraint checks") {
    Scenario s = simple_scenario();
    s.users = {{25, 25, 0}};
    s.targets = {{30, 20, 0}};
    s.min_sensing_snr = 10.0;
    auto layout = AntennaLayout::from_assignments({{0, 10.0}, {0, 20.0}}, s.waveguides);

    SUBCASE("all satisfied") {
        Allocation alloc{{0.5}, {0.3}};
        const auto report = feasibility_report(s, layout, alloc, {12.0}, 5.0);
        CHECK(report.all_ok());
        CHECK(report.sensing.violation == 0.0);
        CHECK(report.time_share.violation == 0.0);
        CHECK(report.energy.violation == 0.0);
        CHECK(report.power.violation == 0.0);
        CHECK(report.spacing.violation == 0.0);
    }
    SUBCASE("snr shortfall is reported in linear units") {
        Allocation alloc{{0.5}, {0.3}};
        const auto report = feasibility_report(s, layout, alloc, {8.0}, 5.0);
        CHECK_FALSE(report.sensing.ok);
        CHECK(report.sensing.violation == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("time share overrun") {
        Allocation alloc{{1.2}, {0.3}};
        const auto report = feasibility_report(s, layout, alloc, {12.0}, 5.0);
        CHECK_FALSE(report.time_share.ok);
        CHECK(report.time_share.violation == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("energy overrun and power excess") {
        Allocation alloc{{0.5}, {0.8}};
        const auto report = feasibility_report(s, layout, alloc, {12.0}, 1100.0);
        CHECK_FALSE(report.energy.ok);
        CHECK(report.energy.violation == doctest::Approx(100.0).epsilon(1e-12));
        CHECK_FALSE(report.power.ok);
        CHECK(report.power.violation == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("spacing violation on one guide") {
        auto tight = AntennaLayout::from_assignments({{0, 10.0}, {0, 10.003}}, s.waveguides);
        Allocation alloc{{0.5}, {0.3}};
        const auto report = feasibility_report(s, tight, alloc, {12.0}, 5.0);
        CHECK_FALSE(report.spacing.ok);
        CHECK(report.spacing.violation == doctest::Approx(0.002).epsilon(1e-9));
    }
}

TEST_CASE("metrics match the naive oracle on random instances") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const int n_antennas = 1 + static_cast<int>(rng.uniform() * 9);
        const int n_users = 1 + static_cast<int>(rng.uniform() * 6);
        const int n_targets = 1 + static_cast<int>(rng.uniform() * 2);
        const bool sqrt_mode = rng.uniform() < 0.5;

        Scenario s = simple_scenario();
        s.waveguides = {Waveguide({0, 0, 10}, {1, 0, 0}, 50, {0, 0, 10}),
                        Waveguide({0, 0, 10}, {0, 1, 0}, 50, {0, 0, 10}),
                        Waveguide({0, 0, 10}, {0, 0, 1}, 50, {0, 0, 10})};
        std::vector<AntennaAssignment> assignments;
        for (int i = 0; i < n_antennas; ++i)
            assignments.push_back({static_cast<int>(rng.uniform() * 3), rng.uniform(0.0, 50.0)});
        auto layout = AntennaLayout::from_assignments(assignments, s.waveguides);

        oracle::Instance in;
        in.carrier_freq_hz = s.carrier_freq_hz;
        in.n_eff = s.n_eff;
        in.noise_power = s.noise_power;
        in.sqrt_amplitude = sqrt_mode;
        for (int i = 0; i < n_antennas; ++i) {
            const Vec3& p = layout.positions[static_cast<size_t>(i)];
            const Vec3& f =
                s.waveguides[static_cast<size_t>(assignments[static_cast<size_t>(i)].waveguide)]
                    .feed_point;
            in.antennas.push_back({p.x, p.y, p.z});
            in.feeds.push_back({f.x, f.y, f.z});
        }
        Allocation alloc;
        double q_left = 1.0;
        for (int k = 0; k < n_users; ++k) {
            const Vec3 u{rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0), 0.0};
            s.users.push_back(u);
            in.users.push_back({u.x, u.y, 0.0});
            const double qk = rng.uniform(0.0, q_left / n_users);
            q_left -= qk;
            alloc.q.push_back(qk);
            alloc.p.push_back(rng.uniform(0.0, s.max_user_power));
        }
        for (int l = 0; l < n_targets; ++l) {
            const Vec3 t{rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0), 0.0};
            s.targets.push_back(t);
            in.targets.push_back({t.x, t.y, 0.0});
        }
        in.q = alloc.q;
        in.p = alloc.p;

        const oracle::Result expect = oracle::evaluate(in);
        const RfConstants rf(s.carrier_freq_hz, s.n_eff);
        const auto mode = sqrt_mode ? SnrAmplitudeMode::Sqrt : SnrAmplitudeMode::AsWritten;
        for (int k = 0; k < n_users; ++k) {
            const ComplexGain g =
                effective_gain(s.users[static_cast<size_t>(k)], layout, s.waveguides, rf);
            const double rate = comm_rate(alloc.q[static_cast<size_t>(k)],
                                          alloc.p[static_cast<size_t>(k)], g, n_antennas,
                                          s.noise_power);
            const double want = expect.rates[static_cast<size_t>(k)];
            CHECK(std::abs(rate - want) <= 1e-9 * std::max(std::abs(want), 1e-12));
        }
        for (int l = 0; l < n_targets; ++l) {
            const double snr = sensing_snr(l, layout, s.waveguides, rf, alloc, s, mode);
            const double want = expect.snrs[static_cast<size_t>(l)];
            CHECK(std::abs(snr - want) <= 1e-9 * std::max(std::abs(want), 1e-12));
        }
    }
}

TEST_CASE("sensing summands bounded by target power over noise") {
    // each summand is S_l / (S_k + noise) < S_l / noise, and the total stays
    // finite; with one user the bound is direct
    Scenario s = simple_scenario();
    s.users = {{20, 25, 0}};
    s.targets = {{28, 22, 0}};
    auto layout = AntennaLayout::from_assignments({{0, 10.0}, {0, 24.0}}, s.waveguides);
    const RfConstants rf(s.carrier_freq_hz, s.n_eff);
    Allocation alloc{{1.0}, {0.5}};
    const double snr = sensing_snr(0, layout, s.waveguides, rf, alloc, s, SnrAmplitudeMode::Sqrt);
    const double target_g2 = std::norm(effective_gain(s.targets[0], layout, s.waveguides, rf));
    CHECK(snr >= 0.0);
    CHECK(std::isfinite(snr));
    CHECK(snr < (alloc.p[0] / 2.0) * target_g2 / s.noise_power);
}
