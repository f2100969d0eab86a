#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stochctl/cavity_states.hpp"
#include "stochctl/modulation.hpp"
#include "stochctl/random.hpp"

namespace stochctl {

using complex = std::complex<double>;

enum class AverageMethod { quadrature, monte_carlo };

struct AverageEstimate {
    complex value;
    double abs_error = 0.0; ///< quadrature error estimate, or standard error of the mean
    AverageMethod method = AverageMethod::quadrature;
    long samples_or_nodes = 0;
};

/// Tells the quadrature that the integrand oscillates with angular
/// frequency up to `frequency` (1/time) for t' in [0, support]; that band is
/// pre-partitioned into panels no wider than one period.
struct OscillationHint {
    double frequency = 0.0;
    double support = 0.0;
};

struct QuadratureOptions {
    double rel_tol = 1e-8;
    OscillationHint hint;
    long max_evaluations = 8'000'000;
};

/// f(t', out) writes one value per component into `out`.
using MultiIntegrand = std::function<void(double, std::span<complex>)>;
using ScalarIntegrand = std::function<complex(double)>;

/// Average of each component of f over the Gamma random time distribution
/// with mean t and variance t*tau.
///
/// Non-oscillatory integrands are first tried with generalized
/// Gauss-Laguerre rules of 16..128 nodes in w = t'/tau; otherwise (or if
/// those fail to converge) an adaptive panel scheme is used: a Gauss-Jacobi
/// panel absorbs the w^(t/tau - 1) endpoint singularity and Gauss-Legendre
/// panels cover the rest of a truncated support, refined until the
/// 16/32-node difference meets rel_tol. Shapes above 1e4 always use the
/// panel scheme over mean +/- 20 standard deviations with the exact density.
/// Throws NonConvergence when the evaluation budget is exhausted.
std::vector<AverageEstimate> gamma_average_quadrature(const MultiIntegrand& f, std::size_t components,
                                                      double t, double tau,
                                                      const QuadratureOptions& options = {});

AverageEstimate gamma_average_quadrature(const ScalarIntegrand& f, double t, double tau,
                                         double rel_tol = 1e-8, OscillationHint hint = {});

/// Sample mean of f over `n_samples` draws of the random time. Draws are
/// split into fixed chunks, each with its own substream of `rng`, so the
/// result does not depend on the number of worker threads.
std::vector<AverageEstimate> gamma_average_monte_carlo(const MultiIntegrand& f, std::size_t components,
                                                       double t, double tau, long n_samples,
                                                       RandomStream& rng);

AverageEstimate gamma_average_monte_carlo(const ScalarIntegrand& f, double t, double tau,
                                          long n_samples, RandomStream& rng);

/// n0 exp(-rate t) with the (error-perturbed) energy rate.
double averaged_mean_photon(double n0, double t, const ModulationParams& params);

/// alpha0 exp(-i omega t - rate t / 2) with the (error-perturbed) field rate
/// and frequency.
complex averaged_field(complex alpha0, double t, const ModulationParams& params);

struct VisibilityResult {
    double time = 0.0;
    double tau = 0.0;
    double x_value = 0.0;
    double visibility = 1.0;
    double numerator_modulus = 0.0;
    double denom_plus = 0.0;
    double denom_minus = 0.0;
    double abs_error = 0.0;
    /// Set when the assembled value exceeded 1 by more than 1e-9 and was clamped.
    bool clamped = false;
    long evaluations = 0;
};

/// Visibility of the averaged cat state: numerator and both denominators are
/// averaged over the random time separately, then combined as
/// |<num>| / sqrt(<den+> <den->). Only the Gamma modulation enters
/// (params.sigma must be 0).
VisibilityResult averaged_visibility(complex alpha, double x, double t, const ModulationParams& params,
                                     double rel_tol = 1e-8);

struct VisibilityMonteCarlo {
    VisibilityResult result;
    double std_error = 0.0; ///< delta-method standard error of the visibility
    AverageEstimate numerator;
    AverageEstimate denom_plus;
    AverageEstimate denom_minus;
    double numerator_re_stderr = 0.0;
    double numerator_im_stderr = 0.0;
};

VisibilityMonteCarlo averaged_visibility_monte_carlo(complex alpha, double x, double t,
                                                     const ModulationParams& params, long n_samples,
                                                     RandomStream& rng);

} // namespace stochctl
