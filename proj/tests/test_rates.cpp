#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nmbloch/rates.hpp"

#include <cmath>
#include <random>

using namespace nmbloch;

namespace {

// Lorentzian test fixture: unit width, coupling folded to 1, laser anchored
// high so the full-line spectrum is unambiguous.
SpectralModel lorentzian_for(double p, double s, double alpha_sq = 1.0) {
    return Lorentzian{alpha_sq, 1.0, 500.0 + s};
}

struct Setup {
    SpectralModel model;
    SystemParams params;
    DressedBasis basis;
};

Setup lorentzian_setup(double p, double s, double alpha_sq = 1.0) {
    Setup s0{lorentzian_for(p, s, alpha_sq),
             make_system_params(0.0, std::max(p, 1e-30), std::nullopt, 500.0), {}};
    s0.basis = dressed_basis(s0.params);
    return s0;
}

Setup ohmic_setup(double p, double s, double alpha = 0.1) {
    Setup s0{Ohmic{alpha, 1.0}, make_system_params(0.0, std::max(p, 1e-30), std::nullopt, s), {}};
    s0.basis = dressed_basis(s0.params);
    return s0;
}

} // namespace

TEST_CASE("lorentzian closed form: exact zeros and limits") {
    for (double q : {-3.0, 0.0, 0.7, 9.9}) {
        const auto r = lorentzian_rate(0.0, q, 2.0);
        CHECK(r.gamma == 0.0);
        CHECK(r.lamb == 0.0);
    }
    // q = 0: gamma = alpha_sq (1 - e^-T), lamb = 0
    for (double T : {0.3, 1.0, 6.0}) {
        const auto r = lorentzian_rate(T, 0.0, 2.0);
        CHECK(r.gamma == doctest::Approx(2.0 * (1.0 - std::exp(-T))).epsilon(1e-14));
        CHECK(r.lamb == doctest::Approx(0.0));
    }
    // late-time plateau
    const double q = 1.7;
    const auto tail = lorentzian_rate(40.0, q, 1.0);
    CHECK(tail.gamma == doctest::Approx(1.0 / (1.0 + q * q)).epsilon(1e-12));
    CHECK(tail.lamb == doctest::Approx(-q / (2.0 * (1.0 + q * q))).epsilon(1e-12));
}

TEST_CASE("lorentzian closed form: negative excursions at large detuning") {
    // s = 10, p = 0.1 drives q = 9.9 on the plus channel
    bool negative_seen = false;
    for (double T = 0.0; T <= 2.0; T += 1e-3) {
        if (lorentzian_rate(T, 9.9, 1.0).gamma < 0.0) negative_seen = true;
    }
    CHECK(negative_seen);
}

TEST_CASE("lorentzian closed form: gamma even in q, lamb odd in q") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> qd(-40.0, 40.0), td(0.0, 30.0);
    for (int i = 0; i < 2000; ++i) {
        const double q = qd(rng), T = td(rng);
        const auto a = lorentzian_rate(T, q, 1.0);
        const auto b = lorentzian_rate(T, -q, 1.0);
        CHECK(a.gamma == doctest::Approx(b.gamma).epsilon(1e-12));
        CHECK(a.lamb == doctest::Approx(-b.lamb).epsilon(1e-12));
    }
}

TEST_CASE("ohmic closed form: cancellation at T = 0 and golden-rule plateau") {
    for (double q : {0.5, 1.0, 5.0, 10.0, 15.0}) {
        const auto r = ohmic_rate(0.0, q, 0.1, 1.0);
        CHECK(std::abs(r.gamma) < 1e-10);
        CHECK(std::abs(r.lamb) < 1e-10);
    }
    // T -> inf: gamma -> 2 pi alpha^2 omega_c q e^-q within the 2/T envelope
    for (double q : {1.0, 5.0, 10.0, 15.0}) {
        const double gM = 2.0 * M_PI * 0.01 * q * std::exp(-q);
        const auto r = ohmic_rate(200.0, q, 0.1, 1.0);
        CHECK(std::abs(r.gamma - gM) <= 0.01 * (2.0 / 200.0));
    }
}

TEST_CASE("ohmic closed form: frozen cross-implementation value") {
    // independently generated at 25-digit precision for T=5, q=1, alpha=0.1, wc=1
    const auto r = ohmic_rate(5.0, 1.0, 0.1, 1.0);
    CHECK(r.gamma == doctest::Approx(0.0238081017766701104).epsilon(1e-12));
    CHECK(r.lamb == doctest::Approx(-0.00291243153870105362).epsilon(1e-12));
}

TEST_CASE("ohmic closed form: markov lamb against principal-value reference") {
    // q e^-q Ei(q) - 1 at q = 1, alpha = 1, wc = 1
    const auto m = markov_limits(SpectralModel{Ohmic{1.0, 1.0}}, 1.0);
    CHECK(m.lamb == doctest::Approx(-0.302825116764933931).epsilon(1e-12));
    CHECK(m.gamma == doctest::Approx(2.0 * M_PI * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("ohmic closed form rejects q <= 0") {
    CHECK_THROWS_AS(ohmic_rate(1.0, 0.0, 0.1, 1.0), std::domain_error);
    CHECK_THROWS_AS(ohmic_rate(1.0, -2.0, 0.1, 1.0), std::domain_error);
}

TEST_CASE("oracle matches lorentzian closed form across regimes") {
    // subset of the (p, s) cells; the acceptance suite sweeps all of them densely
    const double abs_floor = 1e-9;
    for (const auto& [p, s] : std::vector<std::pair<double, double>>{
             {0.01, 10.0}, {1.0, 1.0}, {100.0, 0.1}, {100.0, 10.0}}) {
        const auto su = lorentzian_setup(p, s);
        const auto det = effective_detunings(su.model, su.basis, su.params);
        for (int c = 0; c < 3; ++c) {
            for (double T : {0.15, 0.9, 3.7, 11.0, 30.0}) {
                CAPTURE(p); CAPTURE(s); CAPTURE(c); CAPTURE(T);
                const auto closed = lorentzian_rate(T, det.q[c], 1.0);
                const auto oracle =
                    generic_rate_oracle(su.model, T, su.params.omega_laser.value() +
                                                         kChannelXi[c] * su.basis.omega);
                CHECK(std::abs(closed.gamma - oracle.gamma) <=
                      std::max(1e-6 * std::abs(oracle.gamma), abs_floor));
                CHECK(std::abs(closed.lamb - oracle.lamb) <=
                      std::max(1e-6 * std::abs(oracle.lamb), abs_floor));
            }
        }
    }
}

TEST_CASE("oracle matches ohmic closed form") {
    const double alpha = 0.1;
    const double scale = alpha * alpha;  // omega_c = 1
    for (const auto& [p, s] : std::vector<std::pair<double, double>>{{0.01, 10.0}, {5.0, 10.0}}) {
        const auto su = ohmic_setup(p, s, alpha);
        const auto det = effective_detunings(su.model, su.basis, su.params);
        for (int c = 0; c < 3; ++c) {
            for (double T : {0.2, 1.0, 5.0, 18.0}) {
                CAPTURE(p); CAPTURE(c); CAPTURE(T);
                const auto closed = ohmic_rate(T, det.q[c], alpha, 1.0);
                const auto oracle = generic_rate_oracle(
                    su.model, T, s + kChannelXi[c] * su.basis.omega);
                CHECK(std::abs(closed.gamma - oracle.gamma) <=
                      std::max(1e-6 * std::abs(oracle.gamma), 1e-9 * scale));
                CHECK(std::abs(closed.lamb - oracle.lamb) <=
                      std::max(1e-6 * std::abs(oracle.lamb), 1e-9 * scale));
            }
        }
    }
}

TEST_CASE("oracle is exactly zero at t = 0 and matches the ohmic form near q = 1") {
    const SpectralModel lor{Lorentzian{1.0, 1.0, 500.0}};
    const auto z = generic_rate_oracle(lor, 0.0, 499.0);
    CHECK(z.gamma == 0.0);
    CHECK(z.lamb == 0.0);
    const double alpha = 0.1;
    const SpectralModel ohm{Ohmic{alpha, 1.0}};
    const auto params = make_system_params(0.0, 0.05, std::nullopt, 1.0);
    const auto basis = dressed_basis(params);
    const auto det = effective_detunings(ohm, basis, params);
    for (int c = 0; c < 3; ++c) {
        for (double T : {0.7, 6.0}) {
            const auto closed = ohmic_rate(T, det.q[c], alpha, 1.0);
            const auto oracle = generic_rate_oracle(ohm, T, 1.0 + kChannelXi[c] * 0.05);
            CHECK(std::abs(closed.gamma - oracle.gamma) <=
                  std::max(1e-6 * std::abs(oracle.gamma), 1e-9 * alpha * alpha));
            CHECK(std::abs(closed.lamb - oracle.lamb) <=
                  std::max(1e-6 * std::abs(oracle.lamb), 1e-9 * alpha * alpha));
        }
    }
}

TEST_CASE("oracle window is converged (doubling the tolerance budget changes nothing)") {
    const auto su = lorentzian_setup(100.0, 10.0);
    const double weff = su.params.omega_laser.value() + su.basis.omega;
    const auto a = generic_rate_oracle(su.model, 7.3, weff);
    const auto b = generic_rate_oracle(su.model, 7.3, weff, {1e-13, 1e-10, 80000});
    CHECK(a.gamma == doctest::Approx(b.gamma).epsilon(1e-8));
    CHECK(a.lamb == doctest::Approx(b.lamb).epsilon(1e-8));
}

TEST_CASE("oracle stays convergent far beyond the memory window") {
    // large T with a strongly detuned channel: the seeded window must not blow
    // the interval budget and the plateau must match the closed form
    const auto su = lorentzian_setup(100.0, 10.0);
    const auto det = effective_detunings(su.model, su.basis, su.params);
    const double weff = su.params.omega_laser.value() - su.basis.omega;  // q = s + p = 110
    const auto oracle = generic_rate_oracle(su.model, 250.0, weff, {1e-11, 3e-9, 60000});
    const auto closed = lorentzian_rate(250.0, det.q[0], 1.0);
    CHECK(std::abs(closed.gamma - oracle.gamma) <=
          std::max(1e-6 * std::abs(oracle.gamma), 1e-9));
    CHECK(std::abs(closed.lamb - oracle.lamb) <=
          std::max(1e-6 * std::abs(oracle.lamb), 1e-9));
}

TEST_CASE("markov limits: lorentzian on-peak and tabulated narrow peak") {
    const auto m = markov_limits(SpectralModel{Lorentzian{2.0, 1.0, 50.0}}, 50.0);
    CHECK(m.gamma == doctest::Approx(2.0).epsilon(1e-14));  // alpha_sq at q = 0
    CHECK(m.lamb == doctest::Approx(0.0));

    // delta-like tabulated peak at omega_eff: gamma_M = 2 pi * peak density
    Tabulated t;
    const double w0 = 5.0, width = 1e-4, peak = 0.3;
    t.freq = {w0 - 10, w0 - width, w0, w0 + width, w0 + 10};
    t.density = {0.0, 0.0, peak, 0.0, 0.0};
    const auto mt = markov_limits(SpectralModel{t}, w0);
    CHECK(mt.gamma == doctest::Approx(2.0 * M_PI * peak).epsilon(1e-12));
    // symmetric table about omega_eff: principal value cancels
    CHECK(std::abs(mt.lamb) < 1e-12);
}

TEST_CASE("tabulated markov lamb against subtraction quadrature") {
    Tabulated t;
    t.freq = {1.0, 2.0, 3.5, 4.0, 6.0};
    t.density = {0.0, 0.4, 0.1, 0.3, 0.0};
    const double weff = 3.0;
    const auto m = markov_limits(SpectralModel{t}, weff);
    // P.V. int J/(weff - w) dw = int [J(w) - J(weff)]/(weff - w) dw + J(weff) ln|(weff-a)/(b-weff)|
    const SpectralModel sm{t};
    const double jw = evaluate(sm, weff);
    const auto sub = quad::integrate_segmented(
        [&](double w) {
            if (std::abs(w - weff) < 1e-13) return 0.2;  // -J'(weff) on that segment
            return (evaluate(sm, w) - jw) / (weff - w);
        },
        {1.0, 2.0, 3.0, 3.5, 4.0, 6.0}, {1e-13, 1e-12, 40000});
    const double expected = sub.value + jw * std::log(std::abs((weff - 1.0) / (6.0 - weff)));
    CHECK(m.lamb == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("trajectory: gamma_0 depends only on s, not p") {
    std::vector<double> grid;
    for (int i = 0; i <= 200; ++i) grid.push_back(0.15 * i);
    const auto a = lorentzian_setup(0.01, 1.0);
    const auto b = lorentzian_setup(100.0, 1.0);
    const auto ta = sample_trajectory(a.model, a.basis, a.params, grid);
    const auto tb = sample_trajectory(b.model, b.basis, b.params, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(ta.samples[i].gamma[1] - tb.samples[i].gamma[1]) <= 1e-12);
        CHECK(std::abs(ta.samples[i].lamb[1] - tb.samples[i].lamb[1]) <= 1e-12);
    }
}

TEST_CASE("trajectory: channels collapse in the nonsecular regime") {
    std::vector<double> grid;
    for (int i = 0; i <= 300; ++i) grid.push_back(0.1 * i);
    for (bool ohmic : {false, true}) {
        const auto su = ohmic ? ohmic_setup(0.01, 10.0) : lorentzian_setup(0.01, 10.0);
        const auto traj = sample_trajectory(su.model, su.basis, su.params, grid);
        double max_dev = 0.0, max_g0 = 0.0;
        for (const auto& s : traj.samples) {
            max_dev = std::max({max_dev, std::abs(s.gamma[0] - s.gamma[1]),
                                std::abs(s.gamma[2] - s.gamma[1])});
            max_g0 = std::max(max_g0, std::abs(s.gamma[1]));
        }
        CAPTURE(ohmic);
        CHECK(max_dev / max_g0 <= 0.02);
    }
}

TEST_CASE("trajectory: zero start, markov tails, accumulated integrals stay non-negative") {
    std::vector<double> grid;
    for (int i = 0; i <= 150; ++i) grid.push_back(0.2 * i);
    const auto su = lorentzian_setup(0.1, 10.0);  // oscillatory, rates dip negative
    const auto traj = sample_trajectory(su.model, su.basis, su.params, grid);
    for (int c = 0; c < 3; ++c) {
        CHECK(traj.samples.front().gamma[c] == 0.0);
        CHECK(traj.samples.front().lamb[c] == 0.0);
        // integral of gamma stays >= 0 even though gamma itself oscillates negative
        bool saw_negative_rate = false;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(traj.gamma_int[c][i] >= -1e-12);
            if (traj.samples[i].gamma[c] < 0.0) saw_negative_rate = true;
        }
        CHECK(saw_negative_rate);
        CHECK(std::abs(traj.samples.back().gamma[c] - traj.markov.gamma[c]) <=
              std::max(std::exp(-grid.back()), 2.0 / (grid.back() * traj.time_scale)));
    }
}

TEST_CASE("trajectory grid validation") {
    const auto su = lorentzian_setup(1.0, 1.0);
    CHECK_THROWS_AS(sample_trajectory(su.model, su.basis, su.params, {1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_trajectory(su.model, su.basis, su.params, {0.0, 0.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("effective detunings: conventions agree on the zero channel") {
    const auto lo = lorentzian_setup(3.0, 1.2);
    const auto dl = effective_detunings(lo.model, lo.basis, lo.params);
    CHECK(dl.q[1] == doctest::Approx(1.2));
    CHECK(dl.q[2] == doctest::Approx(1.2 - 3.0));  // plus channel: s - p
    const auto oh = ohmic_setup(0.5, 10.0);
    const auto doh = effective_detunings(oh.model, oh.basis, oh.params);
    CHECK(doh.q[1] == doctest::Approx(10.0));
    CHECK(doh.q[2] == doctest::Approx(10.5));  // plus channel: s + p
}

TEST_CASE("rates csv layout") {
    std::vector<double> grid{0.0, 0.5, 1.0};
    const auto su = lorentzian_setup(1.0, 0.5);
    const auto traj = sample_trajectory(su.model, su.basis, su.params, grid);
    const auto table = rates_csv(traj);
    CHECK(table.header ==
          std::vector<std::string>{"t", "T_dimensionless", "gamma_minus", "gamma_0",
                                   "gamma_plus", "lamb_minus", "lamb_0", "lamb_plus"});
    CHECK(table.rows.size() == 3);
    CHECK(table.rows[1][0] == 0.5);
    CHECK(table.rows[1][1] == 0.5);  // lambda = 1
}
