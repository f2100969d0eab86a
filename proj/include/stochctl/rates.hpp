#pragma once

#include <complex>

#include "stochctl/modulation.hpp"

namespace stochctl {

using complex = std::complex<double>;

/// Average of exp(z t') over the Gamma random time with mean t and
/// variance t*tau, i.e. (1 - z tau)^(-t/tau) on the principal branch.
///
/// Requires Re(z) < 1/tau; throws DivergenceError otherwise. tau = 0 gives
/// exp(z t).
complex gamma_mgf_average(complex z, double t, double tau);

/// Logarithm of gamma_mgf_average, -(t/tau) log(1 - z tau), without phase
/// wrapping. Small z*tau is handled with a complex log1p.
complex gamma_mgf_log_average(complex z, double t, double tau);

/// Energy decay rate of the averaged photon number, log(1 + gamma0 tau)/tau.
double effective_energy_rate(const ModulationParams& params);

struct FieldRenormalization {
    double rate = 0.0;      ///< decay rate of |<a>|^2, i.e. <a> ~ exp(-rate t / 2)
    double frequency = 0.0; ///< oscillation frequency of <a>
};

/// Renormalized field decay rate and frequency of the averaged amplitude.
FieldRenormalization effective_field_rate(const ModulationParams& params);

/// First-order (Gaussian modulation) field rate gamma0 + (omega0^2 - gamma0^2/4) tau.
double gaussian_modulation_rate(const ModulationParams& params);

/// Field rate including the exact contribution of the Gaussian error
/// process: effective rate + sigma (omega0^2 - gamma0^2/4).
double error_perturbed_field_rate(const ModulationParams& params);

/// Field frequency including the error-process shift -sigma omega0 gamma0 / 2.
double error_perturbed_field_frequency(const ModulationParams& params);

/// Exact energy rate with the error process: effective rate - sigma gamma0^2 / 2.
double error_perturbed_energy_rate(const ModulationParams& params);

/// Stability figure sigma * gamma0 * Q^2; the error process is negligible
/// when it is much smaller than one.
double error_stability_parameter(const ModulationParams& params);
bool error_is_negligible(const ModulationParams& params, double threshold = 0.1);

struct EffectiveRates {
    double energy_rate = 0.0;
    double field_rate = 0.0;
    double frequency = 0.0;
    double gaussian_rate = 0.0;
    ModulationParams source_params;
};

EffectiveRates compute_effective_rates(const ModulationParams& params);

/// Fluctuation strength (in units of 1/gamma0) above which the field decay
/// is inhibited.
struct ThresholdResult {
    double exact = 0.0;  ///< largest positive root u of (1 + u/2)^2 + Q^2 u^2 = e^u
    double approx = 0.0; ///< 2 log Q + 2 log(2 log Q)
    double q_factor = 0.0;
    int iterations = 0;
};

/// Requires Q > e. The root is refined to at least 1e-10 relative accuracy.
ThresholdResult decay_threshold(double q_factor, double gamma0 = 1.0);

} // namespace stochctl
