#pragma once

#include <cstddef>
#include <vector>

#include "stochctl/random.hpp"

namespace stochctl {

/// Physical and stochastic parameters of the modulated cavity.
///
/// Units: gamma0 and omega0 are rates (1/time); tau, dt and sigma are times.
/// The cavity length is rescaled as L(t) = L0 / (y(t) + e(t)) where y has
/// unit mean and variance tau/dt per step and e is Gaussian with variance
/// sigma/dt per step.
struct ModulationParams {
    double gamma0 = 1.0;
    double omega0 = 100.0;
    double tau = 0.0;
    double dt = 0.01;
    double sigma = 0.0;

    /// dt defaults to tau/100; when tau = 0 it falls back to 0.01/gamma0.
    static ModulationParams with_default_step(double gamma0, double omega0, double tau,
                                              double sigma = 0.0);

    double q_factor() const noexcept { return omega0 / gamma0; }

    /// Throws InvalidParameter unless gamma0, omega0, dt > 0 and tau, sigma >= 0.
    void validate() const;
};

/// Fabry-Perot geometry from which the unmodulated rates follow.
struct CavityGeometry {
    double length0 = 1.0;
    int mode_index = 1;
    double transmittivity = 1.0;
    double light_speed = 1.0;

    void validate() const;
    double omega0() const;
    double gamma0() const;
    /// Instantaneous length for modulation factor y.
    double length_at(double y) const;
};

struct ModulationStep {
    double y = 1.0;
    double e = 0.0;
};

/// One realization of the piecewise-constant modulation.
struct ModulationTrajectory {
    std::vector<ModulationStep> steps;
    double dt = 0.0;
    /// dt * sum(y + e), accumulated with compensated summation.
    double random_time = 0.0;
    /// Number of steps with y + e < 0 (possible only for sigma > 0).
    std::size_t negative_steps = 0;

    double horizon() const noexcept { return static_cast<double>(steps.size()) * dt; }
    /// Recomputes dt * sum(y + e) from the stored steps.
    double recompute_random_time() const;
};

/// Distribution of the accumulated random time t' after elapsed time t:
/// Gamma with shape t/tau and scale tau.
class GammaTimeDistribution {
  public:
    GammaTimeDistribution(double elapsed_time, double tau);

    double elapsed_time() const noexcept { return elapsed_; }
    double tau() const noexcept { return tau_; }
    double shape() const noexcept { return elapsed_ / tau_; }
    double scale() const noexcept { return tau_; }
    double mean() const noexcept { return elapsed_; }
    double variance() const noexcept { return elapsed_ * tau_; }

  private:
    double elapsed_;
    double tau_;
};

/// Gamma-distributed length-modulation factor: shape dt/tau, scale tau/dt.
/// Throws InvalidParameter for tau <= 0; the unmodulated path is
/// `ModulationSource` with tau = 0.
double sample_modulation_step(const ModulationParams& params, RandomStream& rng);

/// Zero-mean Gaussian error step with variance sigma/dt (0 when sigma = 0).
double sample_error_step(double sigma, double dt, RandomStream& rng);

/// Draws (y, e) pairs for fixed parameters, handling tau = 0 as y = 1.
class ModulationSource {
  public:
    explicit ModulationSource(const ModulationParams& params);
    ModulationStep next(RandomStream& rng) const;

  private:
    ModulationParams params_;
    bool deterministic_;
    GammaSampler step_sampler_;
    double error_stddev_;
};

/// Trajectory of ceil(horizon/dt) steps; the realized horizon is steps*dt.
ModulationTrajectory generate_trajectory(const ModulationParams& params, double horizon,
                                         RandomStream& rng);

/// Density of the random time, evaluated from its logarithm.
double gamma_time_pdf(const GammaTimeDistribution& dist, double t_prime);
/// Natural log of the density (-inf outside the support edge cases).
double gamma_time_log_pdf(const GammaTimeDistribution& dist, double t_prime);

/// Direct draw of the random time t'.
double sample_random_time(const GammaTimeDistribution& dist, RandomStream& rng);

} // namespace stochctl
