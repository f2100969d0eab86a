#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "stochctl/modulation.hpp"

namespace stochctl {

using complex = std::complex<double>;

/// Density operator in the number basis {|0>, ..., |dim-1>}.
struct FockDensityMatrix {
    Eigen::MatrixXcd elements;

    FockDensityMatrix() = default;
    explicit FockDensityMatrix(Eigen::MatrixXcd m);

    int dim() const noexcept { return static_cast<int>(elements.rows()); }

    double trace_error() const;       ///< |Tr rho - 1|
    double hermiticity_error() const; ///< max |rho - rho^dag|
    double min_eigenvalue() const;
    /// Total population of levels >= first_level.
    double tail_population(int first_level) const;
};

/// Piecewise-constant (omega, gamma) pairs, one per modulation step of length dt.
struct DriveSegment {
    double omega = 0.0;
    double gamma = 0.0;
};

struct DriveSchedule {
    std::vector<DriveSegment> segments;
    double dt = 0.0;
};

/// omega0 (y + e), gamma0 (y + e) for every step of the trajectory.
DriveSchedule make_drive_schedule(const ModulationTrajectory& trajectory, double omega0, double gamma0);

struct IntegratorOptions {
    /// Local error bound per step, measured as the entrywise l1 norm of the
    /// embedded error estimate (an upper bound on its trace norm).
    double tol = 1e-10;
    long max_steps = 50'000'000;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    /// Largest population of the top Fock level seen at segment ends.
    double max_top_population = 0.0;
    /// Set when the top-level population exceeded 1e-8.
    bool truncation_warning = false;
};

/// Truncated coherent-state amplitudes e^{-|beta|^2/2} beta^n / sqrt(n!).
Eigen::VectorXcd coherent_vector(complex beta, int dim);

/// Smallest dimension accepted for a state of amplitude alpha.
int minimum_dimension(complex alpha);

/// Projector onto the even cat N (|alpha> + |-alpha>), renormalized in the
/// truncated basis. Throws TruncationError if dim < minimum_dimension(alpha).
FockDensityMatrix build_cat_rho(complex alpha, int dim);
FockDensityMatrix build_coherent_rho(complex alpha, int dim);
FockDensityMatrix build_fock_rho(int n, int dim);

/// Closed-form damped cat N^2 {|a><a| + |-a><-a| + w (|a><-a| + |-a><a|)},
/// with a = alpha(t) and w the coherence weight, projected onto the basis.
FockDensityMatrix analytic_cat_rho(complex alpha, double t, double omega, double gamma, int dim);

/// d rho/dt = -i omega [a^dag a, rho] + gamma D[a] rho integrated for time t
/// with an adaptive Dormand-Prince 5(4) scheme in the lab frame.
FockDensityMatrix evolve_constant(const FockDensityMatrix& rho0, double omega, double gamma, double t,
                                  const IntegratorOptions& options = {}, IntegratorStats* stats = nullptr);

/// Segment-by-segment integration of a piecewise-constant schedule. Every
/// segment boundary is hit exactly.
FockDensityMatrix evolve_trajectory(const FockDensityMatrix& rho0, const DriveSchedule& schedule,
                                    const IntegratorOptions& options = {}, IntegratorStats* stats = nullptr);

/// Observable selector for `expectation`.
struct Observable {
    enum class Kind { number, annihilation, coherence };
    Kind kind = Kind::number;
    complex alpha_t; ///< coherence(alpha_t) evaluates <alpha_t| rho |-alpha_t>

    static Observable number() { return {Kind::number, {}}; }
    static Observable annihilation() { return {Kind::annihilation, {}}; }
    static Observable coherence(complex alpha_t) { return {Kind::coherence, alpha_t}; }
};

complex expectation(const FockDensityMatrix& rho, const Observable& which);

/// <beta| rho |beta> with the normalized truncated coherent vector.
double coherent_fidelity(const FockDensityMatrix& rho, complex beta);

/// Coherence weight w recovered from rho under the assumption that rho has
/// the damped-cat form with amplitude alpha_t: from R = <a|rho|-a>/<a|rho|a>
/// and E = <a|-a>, w = (R(1 + E^2) - 2E) / (1 + E^2 - 2ER).
complex extract_coherence_weight(const FockDensityMatrix& rho, complex alpha_t);

struct EnsembleEstimate {
    complex mean;
    double std_error = 0.0;
    long trajectories = 0;
    std::size_t negative_steps = 0;
};

/// Average of `which` over independently sampled modulation trajectories of
/// length `horizon`. Member k uses RandomStream(derive_seed(master_seed, k)).
EnsembleEstimate trajectory_ensemble(const FockDensityMatrix& rho0, const ModulationParams& params,
                                     double horizon, long trajectories, std::uint64_t master_seed,
                                     const Observable& which, const IntegratorOptions& options = {});

} // namespace stochctl
