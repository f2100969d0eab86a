#include "stochctl/modulation.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stochctl/errors.hpp"

namespace stochctl {

namespace {

bool finite_all(std::initializer_list<double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

} // namespace

ModulationParams ModulationParams::with_default_step(double gamma0, double omega0, double tau,
                                                     double sigma) {
    ModulationParams p;
    p.gamma0 = gamma0;
    p.omega0 = omega0;
    p.tau = tau;
    p.sigma = sigma;
    p.dt = tau > 0.0 ? tau / 100.0 : 0.01 / gamma0;
    p.validate();
    return p;
}

void ModulationParams::validate() const {
    if (!finite_all({gamma0, omega0, tau, dt, sigma})) {
        throw InvalidParameter("ModulationParams: non-finite field");
    }
    if (!(gamma0 > 0.0)) throw InvalidParameter("ModulationParams: gamma0 must be > 0");
    if (!(omega0 > 0.0)) throw InvalidParameter("ModulationParams: omega0 must be > 0");
    if (!(dt > 0.0)) throw InvalidParameter("ModulationParams: dt must be > 0");
    if (tau < 0.0) throw InvalidParameter("ModulationParams: tau must be >= 0");
    if (sigma < 0.0) throw InvalidParameter("ModulationParams: sigma must be >= 0");
}

void CavityGeometry::validate() const {
    if (!finite_all({length0, transmittivity, light_speed}) || !(length0 > 0.0) ||
        !(light_speed > 0.0)) {
        throw InvalidParameter("CavityGeometry: length0 and light_speed must be finite and > 0");
    }
    if (mode_index < 1) throw InvalidParameter("CavityGeometry: mode_index must be >= 1");
    if (!(transmittivity > 0.0 && transmittivity <= 1.0)) {
        throw InvalidParameter("CavityGeometry: transmittivity must lie in (0, 1]");
    }
}

double CavityGeometry::omega0() const {
    validate();
    return mode_index * std::numbers::pi * light_speed / length0;
}

double CavityGeometry::gamma0() const {
    validate();
    return light_speed * transmittivity / (2.0 * length0);
}

double CavityGeometry::length_at(double y) const {
    validate();
    return length0 / y;
}

double ModulationTrajectory::recompute_random_time() const {
    // Neumaier summation; the step loop in generate_trajectory uses the same order.
    double sum = 0.0, comp = 0.0;
    for (const auto& s : steps) {
        const double v = s.y + s.e;
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return (sum + comp) * dt;
}

GammaTimeDistribution::GammaTimeDistribution(double elapsed_time, double tau)
    : elapsed_(elapsed_time), tau_(tau) {
    if (!finite_all({elapsed_time, tau}) || !(elapsed_time > 0.0) || !(tau > 0.0)) {
        throw InvalidParameter("GammaTimeDistribution: elapsed time and tau must be finite and > 0 (t=" +
                               std::to_string(elapsed_time) + ", tau=" + std::to_string(tau) + ")");
    }
}

double sample_modulation_step(const ModulationParams& params, RandomStream& rng) {
    params.validate();
    if (!(params.tau > 0.0)) {
        throw InvalidParameter("sample_modulation_step: tau must be > 0 (use ModulationSource for tau = 0)");
    }
    const double ratio = params.dt / params.tau;
    return GammaSampler(ratio, 1.0 / ratio)(rng);
}

double sample_error_step(double sigma, double dt, RandomStream& rng) {
    if (!finite_all({sigma, dt}) || sigma < 0.0 || !(dt > 0.0)) {
        throw InvalidParameter("sample_error_step: need sigma >= 0 and dt > 0");
    }
    if (sigma == 0.0) return 0.0;
    return std::sqrt(sigma / dt) * rng.normal();
}

ModulationSource::ModulationSource(const ModulationParams& params)
    : params_(params), deterministic_(params.tau == 0.0),
      step_sampler_(deterministic_ ? 1.0 : params.dt / params.tau,
                    deterministic_ ? 1.0 : params.tau / params.dt),
      error_stddev_(std::sqrt(params.sigma / params.dt)) {
    params_.validate();
}

ModulationStep ModulationSource::next(RandomStream& rng) const {
    ModulationStep step;
    step.y = deterministic_ ? 1.0 : step_sampler_(rng);
    step.e = params_.sigma == 0.0 ? 0.0 : error_stddev_ * rng.normal();
    return step;
}

ModulationTrajectory generate_trajectory(const ModulationParams& params, double horizon,
                                         RandomStream& rng) {
    params.validate();
    if (!std::isfinite(horizon) || !(horizon > 0.0)) {
        throw InvalidParameter("generate_trajectory: horizon must be finite and > 0");
    }
    // Tolerate representation error so that horizon = k*dt gives exactly k steps.
    const double ratio = horizon / params.dt;
    const auto count = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
    if (count == 0 || !std::isfinite(ratio)) {
        throw InvalidParameter("generate_trajectory: horizon/dt out of range");
    }

    const ModulationSource source(params);
    ModulationTrajectory traj;
    traj.dt = params.dt;
    traj.steps.reserve(count);
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const ModulationStep s = source.next(rng);
        const double v = s.y + s.e;
        if (v < 0.0) ++traj.negative_steps;
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
        traj.steps.push_back(s);
    }
    traj.random_time = (sum + comp) * params.dt;
    return traj;
}

double gamma_time_log_pdf(const GammaTimeDistribution& dist, double t_prime) {
    if (!(t_prime >= 0.0)) throw DomainError("gamma_time_pdf: t' must be >= 0");
    const double s = dist.shape();
    const double tau = dist.tau();
    if (t_prime == 0.0) {
        if (s < 1.0) return std::numeric_limits<double>::infinity();
        if (s == 1.0) return -std::log(tau);
        return -std::numeric_limits<double>::infinity();
    }
    const double w = t_prime / tau;
    return (s - 1.0) * std::log(w) - w - std::log(tau) - std::lgamma(s);
}

double gamma_time_pdf(const GammaTimeDistribution& dist, double t_prime) {
    return std::exp(gamma_time_log_pdf(dist, t_prime));
}

double sample_random_time(const GammaTimeDistribution& dist, RandomStream& rng) {
    return GammaSampler(dist.shape(), dist.scale())(rng);
}

} // namespace stochctl
