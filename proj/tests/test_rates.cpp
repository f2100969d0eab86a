#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "stochctl/errors.hpp"
#include "stochctl/rates.hpp"

using namespace stochctl;

namespace {

complex integrate_mgf(complex z, double t, double tau) { return oracle::gamma_mgf(z, t, tau); }

} // namespace

TEST_CASE("gamma MGF average against direct integration") {
    for (double tau : {0.05, 0.5, 2.0}) {
        for (double t : {0.3, 1.0, 4.0}) {
            for (complex z : {complex(-1.0, 0.0), complex(-0.5, -3.0), complex(0.2, 1.0)}) {
                CAPTURE(tau);
                CAPTURE(t);
                CAPTURE(z);
                const complex ref = integrate_mgf(z, t, tau);
                const complex got = gamma_mgf_average(z, t, tau);
                CHECK(std::abs(got - ref) <= 1e-9 * std::abs(ref));
            }
        }
    }
}

TEST_CASE("gamma MGF edge cases") {
    CHECK(std::abs(gamma_mgf_average({-1.0, 2.0}, 1.5, 0.0) - std::exp(complex(-1.5, 3.0))) < 1e-15);
    CHECK(gamma_mgf_average({-1.0, 0.0}, 0.0, 1.0) == complex(1.0, 0.0));
    CHECK_THROWS_AS(gamma_mgf_average({1.0, 0.0}, 1.0, 1.0), DivergenceError);
    CHECK_THROWS_AS(gamma_mgf_average({2.0, 5.0}, 1.0, 0.6), DivergenceError);
    // tiny z tau: (1 - z tau)^(-t/tau) -> exp(z t) without cancellation loss
    const complex small = gamma_mgf_log_average({-1.0, 0.0}, 1.0, 1e-14);
    CHECK(small.real() == doctest::Approx(-1.0 + 0.5e-14).epsilon(1e-15));
    // the log is continuous in z: no 2 pi wrapping for large oscillation phases
    const complex big = gamma_mgf_log_average({-0.5, -1000.0}, 10.0, 1.0);
    CHECK(big.imag() == doctest::Approx(-10.0 * std::atan2(1000.0, 1.5)));
}

TEST_CASE("energy rate from the real MGF") {
    for (double tau : {1e-6, 0.5, 1.0, 10.0, 1e3}) {
        const auto p = ModulationParams::with_default_step(1.0, 100.0, tau);
        const double t = 2.0;
        const double from_mgf = -std::log(integrate_mgf({-1.0, 0.0}, t, tau).real()) / t;
        CAPTURE(tau);
        CHECK(effective_energy_rate(p) == doctest::Approx(from_mgf).epsilon(1e-9));
    }
    CHECK(effective_energy_rate(ModulationParams::with_default_step(2.0, 1.0, 0.0)) == 2.0);
    CHECK(effective_energy_rate(ModulationParams::with_default_step(1.0, 1.0, 1e-12)) ==
          doctest::Approx(1.0 - 0.5e-12).epsilon(1e-15));
}

TEST_CASE("field rate and frequency from the complex MGF") {
    for (double q : {10.0, 100.0}) {
        for (double tau : {1e-3, 0.1, 1.5, 20.0}) {
            const auto p = ModulationParams::with_default_step(1.0, q, tau);
            const double t = 0.7;
            const complex avg = integrate_mgf({-0.5, -q}, t, tau);
            const FieldRenormalization f = effective_field_rate(p);
            CAPTURE(q);
            CAPTURE(tau);
            CHECK(f.rate == doctest::Approx(-2.0 * std::log(std::abs(avg)) / t).epsilon(1e-8));
            // phase is known only modulo 2 pi / t from a single time
            const double phase = std::remainder(-f.frequency * t - std::arg(avg), 2 * std::numbers::pi);
            CHECK(std::abs(phase) < 1e-8);
        }
    }
}

TEST_CASE("field rate limits") {
    const auto tiny = ModulationParams::with_default_step(1.0, 100.0, 1e-12);
    CHECK(effective_field_rate(tiny).rate == doctest::Approx(gaussian_modulation_rate(tiny)).epsilon(1e-12));
    CHECK(effective_field_rate(tiny).frequency == doctest::Approx(100.0).epsilon(1e-9));
    const auto none = ModulationParams::with_default_step(1.0, 100.0, 0.0);
    CHECK(effective_field_rate(none).rate == 1.0);
    CHECK(effective_field_rate(none).frequency == 100.0);
    const auto big = ModulationParams::with_default_step(1.0, 100.0, 1e6);
    CHECK(effective_field_rate(big).rate == doctest::Approx(std::log(1e12 * (0.25 + 1e4)) / 1e6).epsilon(1e-6));
}

TEST_CASE("Gaussian comparison rate") {
    const auto p = ModulationParams::with_default_step(2.0, 30.0, 0.1);
    CHECK(gaussian_modulation_rate(p) == doctest::Approx(2.0 + (900.0 - 1.0) * 0.1));
    for (double tau : {1.0, 10.0, 100.0, 1e4}) {
        const auto q = ModulationParams::with_default_step(1.0, 100.0, tau);
        CHECK(gaussian_modulation_rate(q) > effective_field_rate(q).rate);
    }
}

TEST_CASE("error-perturbed rates equal the Gaussian MGF of the integrated error") {
    // A Gaussian integrated error of variance sigma t multiplies <exp(z t')> by exp(z^2 sigma t / 2).
    for (double sigma : {0.0, 1e-5, 1e-4, 3e-3}) {
        for (double tau : {0.0, 0.5, 20.0}) {
            const auto p = ModulationParams::with_default_step(1.0, 100.0, tau, sigma);
            const auto p0 = ModulationParams::with_default_step(1.0, 100.0, tau);
            const double t = 1.3;
            const complex zf(-0.5, -100.0);
            const complex lf = -0.5 * effective_field_rate(p0).rate * t -
                               complex(0, 1) * effective_field_rate(p0).frequency * t + zf * zf * sigma * t / 2.0;
            CHECK(error_perturbed_field_rate(p) == doctest::Approx(-2.0 * lf.real() / t).epsilon(1e-13));
            CHECK(error_perturbed_field_frequency(p) == doctest::Approx(-lf.imag() / t).epsilon(1e-13));
            const double le = -effective_energy_rate(p0) * t + sigma * t / 2.0;
            CHECK(error_perturbed_energy_rate(p) == doctest::Approx(-le / t).epsilon(1e-13));
        }
    }
}

TEST_CASE("stability diagnostic") {
    const auto p = ModulationParams::with_default_step(1.0, 100.0, 1.0, 1e-6);
    CHECK(error_stability_parameter(p) == doctest::Approx(1e-2));
    CHECK(error_is_negligible(p));
    const auto q = ModulationParams::with_default_step(1.0, 100.0, 1.0, 1e-4);
    CHECK_FALSE(error_is_negligible(q));
}

TEST_CASE("threshold root against a scanning bisection") {
    for (double q : {10.0, 100.0, 1000.0, 1e4}) {
        const auto g = [q](double u) { return u - std::log((1 + u / 2) * (1 + u / 2) + q * q * u * u); };
        // largest sign change on a fine grid, then plain bisection
        double hi = 200.0;
        while (g(hi - 0.01) > 0) hi -= 0.01;
        double lo = hi - 0.01;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > 0 ? hi : lo) = mid;
        }
        const ThresholdResult th = decay_threshold(q);
        CAPTURE(q);
        CHECK(th.exact == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
        CHECK(th.approx == doctest::Approx(2 * std::log(q) + 2 * std::log(2 * std::log(q))));
        const auto p = ModulationParams::with_default_step(1.0, q, th.exact);
        CHECK(std::abs(effective_field_rate(p).rate - 1.0) < 1e-10);
    }
    CHECK(decay_threshold(100.0).exact == doctest::Approx(14.568).epsilon(1e-4));
    CHECK(decay_threshold(100.0, 3.0).exact == decay_threshold(100.0).exact);
    CHECK_THROWS_AS(decay_threshold(2.0), InvalidParameter);
    CHECK_THROWS_AS(decay_threshold(std::nan("")), InvalidParameter);
}
