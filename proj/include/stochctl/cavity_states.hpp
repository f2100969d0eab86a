#pragma once

#include <complex>
#include <functional>

namespace stochctl {

using complex = std::complex<double>;

/// Coherent-state amplitude; |alpha|^2 is the mean photon number.
struct CoherentLabel {
    complex alpha;
};

/// Even cat state N (|alpha> + |-alpha>).
struct CatState {
    complex alpha;
    double normalization = 0.0; ///< N = (2 + 2 exp(-2|alpha|^2))^(-1/2)

    static CatState even(complex alpha);
};

/// Analytic form of the cat state after damped evolution for time t.
struct EvolvedCat {
    CoherentLabel label_t;        ///< alpha(t)
    double eta = 1.0;             ///< exp(-gamma0 t)
    double coherence_weight = 1.0; ///< exp(-2|alpha|^2 (1 - eta))
};

/// alpha exp(-(i omega0 + gamma0/2) t).
CoherentLabel coherent_label_at(complex alpha, double t, double omega0, double gamma0);

/// Position-quadrature wavefunction <X|alpha> with X = (a + a^dag)/sqrt(2).
complex quadrature_overlap(double x, complex alpha);
/// Logarithm of quadrature_overlap (no exponentiation).
complex log_quadrature_overlap(double x, complex alpha);

EvolvedCat evolved_cat(complex alpha, double t, double omega0, double gamma0);

/// Visibility in the absence of modulation, exp(-2|alpha|^2 (1 - exp(-gamma0 t))).
double visibility_unmodulated(complex alpha, double t, double gamma0);

/// The three time-dependent quantities that are averaged separately.
struct VisibilityTerms {
    complex numerator;   ///< exp(-2|alpha|^2 (1 - eta)) <X|alpha(t)><-alpha(t)|X>
    double denom_plus;   ///< |<X|alpha(t)>|^2
    double denom_minus;  ///< |<X|-alpha(t)>|^2
};

using VisibilityIntegrand = std::function<VisibilityTerms(double)>;

/// Returns t' -> VisibilityTerms for the cat with initial amplitude alpha.
VisibilityIntegrand visibility_integrands(double x, complex alpha, double omega0, double gamma0);

/// |numerator| / sqrt(denom_plus * denom_minus).
double visibility_ratio(const VisibilityTerms& terms);

/// Literal evaluation of the overlap-based visibility formula at quadrature
/// value x, without any simplification.
double visibility_from_overlaps(double x, complex alpha, double t, double omega0, double gamma0);

} // namespace stochctl
