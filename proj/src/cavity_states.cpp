#include "stochctl/cavity_states.hpp"

#include <cmath>
#include <numbers>

#include "stochctl/errors.hpp"

namespace stochctl {

namespace {

void require_time(double t) {
    if (!std::isfinite(t) || t < 0.0) throw InvalidParameter("cavity states: t must be finite and >= 0");
}

} // namespace

CatState CatState::even(complex alpha) {
    const double n2 = std::norm(alpha);
    return {alpha, 1.0 / std::sqrt(2.0 + 2.0 * std::exp(-2.0 * n2))};
}

CoherentLabel coherent_label_at(complex alpha, double t, double omega0, double gamma0) {
    require_time(t);
    return {alpha * std::exp(complex(-0.5 * gamma0 * t, -omega0 * t))};
}

complex log_quadrature_overlap(double x, complex alpha) {
    const double quarter_log_pi = 0.25 * std::log(std::numbers::pi);
    return -quarter_log_pi - 0.5 * std::norm(alpha) - 0.5 * x * x - 0.5 * alpha * alpha +
           std::numbers::sqrt2 * x * alpha;
}

complex quadrature_overlap(double x, complex alpha) { return std::exp(log_quadrature_overlap(x, alpha)); }

EvolvedCat evolved_cat(complex alpha, double t, double omega0, double gamma0) {
    require_time(t);
    EvolvedCat out;
    out.label_t = coherent_label_at(alpha, t, omega0, gamma0);
    out.eta = std::exp(-gamma0 * t);
    out.coherence_weight = std::exp(-2.0 * std::norm(alpha) * -std::expm1(-gamma0 * t));
    return out;
}

double visibility_unmodulated(complex alpha, double t, double gamma0) {
    require_time(t);
    return std::exp(-2.0 * std::norm(alpha) * -std::expm1(-gamma0 * t));
}

VisibilityIntegrand visibility_integrands(double x, complex alpha, double omega0, double gamma0) {
    const double n2 = std::norm(alpha);
    return [=](double t_prime) {
        const complex at = alpha * std::exp(complex(-0.5 * gamma0 * t_prime, -omega0 * t_prime));
        const complex log_plus = log_quadrature_overlap(x, at);
        const complex log_minus = log_quadrature_overlap(x, -at);
        const double log_weight = -2.0 * n2 * -std::expm1(-gamma0 * t_prime);
        VisibilityTerms terms;
        terms.numerator = std::exp(log_weight + log_plus + std::conj(log_minus));
        terms.denom_plus = std::exp(2.0 * log_plus.real());
        terms.denom_minus = std::exp(2.0 * log_minus.real());
        return terms;
    };
}

double visibility_ratio(const VisibilityTerms& terms) {
    return std::abs(terms.numerator) / std::sqrt(terms.denom_plus * terms.denom_minus);
}

double visibility_from_overlaps(double x, complex alpha, double t, double omega0, double gamma0) {
    const EvolvedCat cat = evolved_cat(alpha, t, omega0, gamma0);
    const complex plus = quadrature_overlap(x, cat.label_t.alpha);
    const complex minus = quadrature_overlap(x, -cat.label_t.alpha);
    const double num = std::abs(cat.coherence_weight * plus * std::conj(minus));
    const double den = std::sqrt((plus * std::conj(plus)).real() * (minus * std::conj(minus)).real());
    return num / den;
}

} // namespace stochctl
