#include "stochctl/rates.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <string>

#include "stochctl/errors.hpp"
#include "stochctl/roots.hpp"

namespace stochctl {

namespace {

// log(1 + w) for complex w, accurate for small |w|.
complex complex_log1p(complex w) {
    const double x = w.real(), y = w.imag();
    const double re = 0.5 * std::log1p(2.0 * x + x * x + y * y);
    const double im = std::atan2(y, 1.0 + x);
    return {re, im};
}

} // namespace

complex gamma_mgf_log_average(complex z, double t, double tau) {
    if (!(t >= 0.0) || !(tau >= 0.0) || !std::isfinite(t) || !std::isfinite(tau)) {
        throw InvalidParameter("gamma_mgf_average: need finite t >= 0 and tau >= 0");
    }
    if (tau == 0.0) return z * t;
    if (!(z.real() * tau < 1.0)) {
        throw DivergenceError("gamma_mgf_average: Re(z) tau = " + std::to_string(z.real() * tau) +
                              " >= 1, average diverges");
    }
    // 1 - z tau has positive real part here, so the principal branch is never crossed.
    assert(1.0 - z.real() * tau > 0.0);
    if (t == 0.0) return {0.0, 0.0};
    return -(t / tau) * complex_log1p(-z * tau);
}

complex gamma_mgf_average(complex z, double t, double tau) {
    return std::exp(gamma_mgf_log_average(z, t, tau));
}

double effective_energy_rate(const ModulationParams& params) {
    params.validate();
    if (params.tau == 0.0) return params.gamma0;
    return std::log1p(params.gamma0 * params.tau) / params.tau;
}

FieldRenormalization effective_field_rate(const ModulationParams& params) {
    params.validate();
    if (params.tau == 0.0) return {params.gamma0, params.omega0};
    const double u = 0.5 * params.gamma0 * params.tau;
    const double v = params.omega0 * params.tau;
    FieldRenormalization out;
    out.rate = std::log1p(2.0 * u + u * u + v * v) / params.tau;
    out.frequency = std::atan2(v, 1.0 + u) / params.tau;
    return out;
}

double gaussian_modulation_rate(const ModulationParams& params) {
    params.validate();
    const double g = params.gamma0, w = params.omega0;
    return g + (w * w - 0.25 * g * g) * params.tau;
}

double error_perturbed_field_rate(const ModulationParams& params) {
    const double g = params.gamma0, w = params.omega0;
    return effective_field_rate(params).rate + params.sigma * (w * w - 0.25 * g * g);
}

double error_perturbed_field_frequency(const ModulationParams& params) {
    return effective_field_rate(params).frequency - 0.5 * params.sigma * params.omega0 * params.gamma0;
}

double error_perturbed_energy_rate(const ModulationParams& params) {
    return effective_energy_rate(params) - 0.5 * params.sigma * params.gamma0 * params.gamma0;
}

double error_stability_parameter(const ModulationParams& params) {
    params.validate();
    const double q = params.q_factor();
    return params.sigma * params.gamma0 * q * q;
}

bool error_is_negligible(const ModulationParams& params, double threshold) {
    return error_stability_parameter(params) < threshold;
}

EffectiveRates compute_effective_rates(const ModulationParams& params) {
    EffectiveRates r;
    r.energy_rate = effective_energy_rate(params);
    const auto field = effective_field_rate(params);
    r.field_rate = field.rate;
    r.frequency = field.frequency;
    r.gaussian_rate = gaussian_modulation_rate(params);
    r.source_params = params;
    return r;
}

ThresholdResult decay_threshold(double q_factor, double gamma0) {
    if (!std::isfinite(q_factor) || !(q_factor > std::numbers::e)) {
        throw InvalidParameter("decay_threshold: Q must exceed e (got " + std::to_string(q_factor) + ")");
    }
    if (!std::isfinite(gamma0) || !(gamma0 > 0.0)) {
        throw InvalidParameter("decay_threshold: gamma0 must be > 0");
    }
    const double q2 = q_factor * q_factor;
    const double log_q = std::log(q_factor);

    ThresholdResult out;
    out.q_factor = q_factor;
    out.approx = 2.0 * log_q + 2.0 * std::log(2.0 * log_q);

    // g(u) = u - log((1 + u/2)^2 + Q^2 u^2): negative while the field decay is
    // accelerated, positive once it is inhibited.
    auto g = [q2](double u) { return u - std::log((1.0 + 0.5 * u) * (1.0 + 0.5 * u) + q2 * u * u); };
    auto dg = [q2](double u) {
        const double a = 1.0 + 0.5 * u;
        return 1.0 - (a + 2.0 * q2 * u) / (a * a + q2 * u * u);
    };

    double lo = 0.5 * out.approx, hi = 4.0 * out.approx;
    for (int widen = 0; widen < 8 && g(lo) >= 0.0; ++widen) lo *= 0.5;
    for (int widen = 0; widen < 8 && g(hi) <= 0.0; ++widen) hi *= 2.0;
    if (g(lo) >= 0.0 || g(hi) <= 0.0) {
        throw NoRootError("decay_threshold: crossing not bracketed for Q=" + std::to_string(q_factor) +
                          " (g(" + std::to_string(lo) + ")=" + std::to_string(g(lo)) + ", g(" +
                          std::to_string(hi) + ")=" + std::to_string(g(hi)) + ")");
    }
    const RootResult root = newton_bisect(g, dg, lo, hi, 1e-14);
    out.exact = root.root;
    out.iterations = root.iterations;
    return out;
}

} // namespace stochctl
