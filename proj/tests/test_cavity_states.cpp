#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "stochctl/cavity_states.hpp"
#include "stochctl/errors.hpp"

using namespace stochctl;

namespace {

// <X|alpha> summed over number states: sum_n c_n psi_n(X) with normalized
// Hermite functions from their three-term recurrence.
complex overlap_by_series(double x, complex alpha, int terms = 120) {
    double psi_prev = 0.0;
    double psi = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    complex c = std::exp(-0.5 * std::norm(alpha));
    complex sum = c * psi;
    for (int n = 1; n < terms; ++n) {
        const double next = std::sqrt(2.0 / n) * x * psi - std::sqrt((n - 1.0) / n) * psi_prev;
        psi_prev = psi;
        psi = next;
        c *= alpha / std::sqrt(static_cast<double>(n));
        sum += c * psi;
    }
    return sum;
}

} // namespace

TEST_CASE("cat normalization") {
    CHECK(CatState::even({0, 0}).normalization == doctest::Approx(0.5));
    const CatState c = CatState::even({0, 2});
    CHECK(c.normalization == doctest::Approx(1.0 / std::sqrt(2 + 2 * std::exp(-8.0))));
}

TEST_CASE("coherent label decays and rotates") {
    const CoherentLabel l = coherent_label_at({0, 2}, 0.3, 10.0, 1.0);
    CHECK(std::abs(l.alpha) == doctest::Approx(2 * std::exp(-0.15)));
    CHECK(std::arg(l.alpha) == doctest::Approx(std::remainder(std::numbers::pi / 2 - 3.0, 2 * std::numbers::pi)));
    CHECK_THROWS_AS(coherent_label_at({1, 0}, -1.0, 1.0, 1.0), InvalidParameter);
}

TEST_CASE("quadrature wavefunction matches the number-state series") {
    for (complex a : {complex(0, 0), complex(0, 2), complex(1.2, -0.7), complex(-2, 1)}) {
        for (double x : {-2.5, -0.3, 0.0, 1.0, 3.2}) {
            CAPTURE(a);
            CAPTURE(x);
            CHECK(std::abs(quadrature_overlap(x, a) - overlap_by_series(x, a)) < 1e-12);
        }
    }
}

TEST_CASE("quadrature wavefunction is normalized") {
    for (complex a : {complex(0, 2), complex(1.5, 0.5)}) {
        const double norm = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [a](double x) { return std::norm(quadrature_overlap(x, a)); }, -15.0, 15.0, 15, 1e-14);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("damped cat weight and the unmodulated visibility") {
    const EvolvedCat c = evolved_cat({0, 2}, 0.1, 100.0, 1.0);
    CHECK(c.eta == doctest::Approx(std::exp(-0.1)));
    CHECK(c.coherence_weight == doctest::Approx(0.4671).epsilon(1e-4));
    for (double t : {0.0, 0.05, 0.7, 3.0}) {
        const double closed = std::exp(-8.0 * (1.0 - std::exp(-t)));
        CHECK(visibility_unmodulated({0, 2}, t, 1.0) == doctest::Approx(closed).epsilon(1e-14));
        for (double x : {0.0, 0.4, -1.3}) {
            CHECK(visibility_from_overlaps(x, {0, 2}, t, 100.0, 1.0) == doctest::Approx(closed).epsilon(1e-12));
        }
    }
}

TEST_CASE("visibility integrands agree with the explicit overlaps") {
    const complex alpha(0, 2);
    const auto f = visibility_integrands(0.7, alpha, 100.0, 1.0);
    for (double tp : {0.0, 0.013, 0.5, 2.0, 9.0}) {
        const VisibilityTerms v = f(tp);
        const EvolvedCat cat = evolved_cat(alpha, tp, 100.0, 1.0);
        const complex plus = quadrature_overlap(0.7, cat.label_t.alpha);
        const complex minus = quadrature_overlap(0.7, -cat.label_t.alpha);
        const complex num = cat.coherence_weight * plus * std::conj(minus);
        CHECK(std::abs(v.numerator - num) < 1e-14);
        CHECK(v.denom_plus == doctest::Approx(std::norm(plus)).epsilon(1e-13));
        CHECK(v.denom_minus == doctest::Approx(std::norm(minus)).epsilon(1e-13));
        CHECK(visibility_ratio(v) == doctest::Approx(cat.coherence_weight).epsilon(1e-12));
    }
}

TEST_CASE("log-space integrands stay finite where the overlaps underflow") {
    const auto f = visibility_integrands(30.0, {0, 2}, 100.0, 1.0);
    const VisibilityTerms v = f(0.2);
    CHECK(std::isfinite(v.denom_plus));
    CHECK(v.denom_plus >= 0.0);
}
