#include "stochctl/lindblad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "stochctl/cavity_states.hpp"
#include "stochctl/errors.hpp"
#include "stochctl/parallel.hpp"

namespace stochctl {

FockDensityMatrix::FockDensityMatrix(Eigen::MatrixXcd m) : elements(std::move(m)) {
    if (elements.rows() != elements.cols() || elements.rows() == 0) {
        throw InvalidParameter("FockDensityMatrix: matrix must be square and non-empty");
    }
}

double FockDensityMatrix::trace_error() const { return std::abs(elements.trace() - complex(1.0, 0.0)); }

double FockDensityMatrix::hermiticity_error() const {
    return (elements - elements.adjoint()).cwiseAbs().maxCoeff();
}

double FockDensityMatrix::min_eigenvalue() const {
    const Eigen::MatrixXcd h = 0.5 * (elements + elements.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double FockDensityMatrix::tail_population(int first_level) const {
    double sum = 0.0;
    for (int n = std::max(first_level, 0); n < dim(); ++n) sum += elements(n, n).real();
    return sum;
}

DriveSchedule make_drive_schedule(const ModulationTrajectory& trajectory, double omega0, double gamma0) {
    DriveSchedule schedule;
    schedule.dt = trajectory.dt;
    schedule.segments.reserve(trajectory.steps.size());
    for (const auto& s : trajectory.steps) {
        const double factor = s.y + s.e;
        schedule.segments.push_back({omega0 * factor, gamma0 * factor});
    }
    return schedule;
}

Eigen::VectorXcd coherent_vector(complex beta, int dim) {
    if (dim < 1) throw InvalidParameter("coherent_vector: dim must be >= 1");
    Eigen::VectorXcd v(dim);
    v(0) = std::exp(-0.5 * std::norm(beta));
    for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * beta / std::sqrt(static_cast<double>(n));
    return v;
}

int minimum_dimension(complex alpha) {
    const double n2 = std::norm(alpha);
    return static_cast<int>(std::ceil(n2 + 10.0 * std::sqrt(n2) + 10.0));
}

namespace {

void require_dimension(complex alpha, int dim) {
    if (dim < minimum_dimension(alpha)) {
        throw TruncationError("Fock truncation dim=" + std::to_string(dim) + " too small for |alpha|=" +
                              std::to_string(std::abs(alpha)) + " (need >= " +
                              std::to_string(minimum_dimension(alpha)) + ")");
    }
}

FockDensityMatrix projector(const Eigen::VectorXcd& psi) {
    const Eigen::VectorXcd normalized = psi / psi.norm();
    return FockDensityMatrix(normalized * normalized.adjoint());
}

} // namespace

FockDensityMatrix build_cat_rho(complex alpha, int dim) {
    require_dimension(alpha, dim);
    return projector(coherent_vector(alpha, dim) + coherent_vector(-alpha, dim));
}

FockDensityMatrix build_coherent_rho(complex alpha, int dim) {
    require_dimension(alpha, dim);
    return projector(coherent_vector(alpha, dim));
}

FockDensityMatrix build_fock_rho(int n, int dim) {
    if (n < 0 || n >= dim) throw TruncationError("build_fock_rho: level outside truncation");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    m(n, n) = 1.0;
    return FockDensityMatrix(std::move(m));
}

FockDensityMatrix analytic_cat_rho(complex alpha, double t, double omega, double gamma, int dim) {
    require_dimension(alpha, dim);
    const EvolvedCat cat = evolved_cat(alpha, t, omega, gamma);
    const CatState initial = CatState::even(alpha);
    const Eigen::VectorXcd a = coherent_vector(cat.label_t.alpha, dim);
    const Eigen::VectorXcd b = coherent_vector(-cat.label_t.alpha, dim);
    const double n2 = initial.normalization * initial.normalization;
    Eigen::MatrixXcd m = n2 * (a * a.adjoint() + b * b.adjoint() +
                               cat.coherence_weight * (a * b.adjoint() + b * a.adjoint()));
    return FockDensityMatrix(std::move(m));
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class LindbladStepper {
  public:
    LindbladStepper(int dim, const IntegratorOptions& options, IntegratorStats* stats)
        : dim_(dim), options_(options), stats_(stats), sqrt_level_(dim) {
        if (!(options.tol > 0.0)) throw InvalidParameter("integrator tol must be > 0");
        for (int m = 0; m < dim; ++m) sqrt_level_[m] = std::sqrt(static_cast<double>(m + 1));
        for (auto& k : k_) k.resize(dim, dim);
        stage_.resize(dim, dim);
        next_.resize(dim, dim);
    }

    // Advances rho by duration under constant (omega, gamma).
    void advance(Eigen::MatrixXcd& rho, double omega, double gamma, double duration) {
        if (!std::isfinite(omega) || !std::isfinite(gamma) || !std::isfinite(duration) || duration < 0.0) {
            throw InvalidParameter("integrator: non-finite rate or negative duration");
        }
        const double scale = std::abs(omega) * (dim_ - 1) + std::abs(gamma) * dim_;
        if (duration == 0.0 || scale == 0.0) return;
        omega_ = omega;
        gamma_ = gamma;

        double h = scaled_step_ > 0.0 ? scaled_step_ / scale : 0.01 / scale;
        double elapsed = 0.0;
        rhs(rho, k_[0]);
        for (;;) {
            const double remaining = duration - elapsed;
            const bool last = h >= remaining;
            const double step = last ? remaining : h;
            const double err = trial_step(rho, step);
            const double factor =
                err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(options_.tol / err, 0.2), 0.2, 5.0);
            if (err <= options_.tol) {
                rho.swap(next_);
                std::swap(k_[0], k_[6]);
                if (stats_) ++stats_->accepted;
                if (++steps_ > options_.max_steps) {
                    throw NonConvergence("integrator: step budget exhausted", steps_, err);
                }
                // A step shortened to land on the boundary does not shrink the carried step size.
                if (!last || step * factor > h) h = step * factor;
                if (last) break;
                elapsed += step;
            } else {
                if (stats_) ++stats_->rejected;
                h = step * factor;
                if (h < 1e-15 * duration) {
                    throw NonConvergence("integrator: step size underflow", steps_, err);
                }
            }
        }
        scaled_step_ = h * scale;

        if (stats_) {
            const double top = rho(dim_ - 1, dim_ - 1).real();
            stats_->max_top_population = std::max(stats_->max_top_population, top);
            if (top > 1e-8) stats_->truncation_warning = true;
        }
    }

  private:
    void rhs(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
        const int d = dim_;
        const complex* in = rho.data();
        complex* o = out.data();
        for (int n = 0; n < d; ++n) {
            for (int m = 0; m < d; ++m) {
                const int idx = m + n * d;
                const complex coeff(-0.5 * gamma_ * (m + n), -omega_ * (m - n));
                complex v = coeff * in[idx];
                if (m + 1 < d && n + 1 < d) v += (gamma_ * sqrt_level_[m] * sqrt_level_[n]) * in[idx + 1 + d];
                o[idx] = v;
            }
        }
    }

    // One Dormand-Prince step of size h from rho (k_[0] = f(rho) on entry).
    // Leaves the 5th-order result in next_, f(next_) in k_[6]; returns the error norm.
    double trial_step(const Eigen::MatrixXcd& rho, double h) {
        stage_ = rho + (h * a21) * k_[0];
        rhs(stage_, k_[1]);
        stage_ = rho + h * (a31 * k_[0] + a32 * k_[1]);
        rhs(stage_, k_[2]);
        stage_ = rho + h * (a41 * k_[0] + a42 * k_[1] + a43 * k_[2]);
        rhs(stage_, k_[3]);
        stage_ = rho + h * (a51 * k_[0] + a52 * k_[1] + a53 * k_[2] + a54 * k_[3]);
        rhs(stage_, k_[4]);
        stage_ = rho + h * (a61 * k_[0] + a62 * k_[1] + a63 * k_[2] + a64 * k_[3] + a65 * k_[4]);
        rhs(stage_, k_[5]);
        next_ = rho + h * (b1 * k_[0] + b3 * k_[2] + b4 * k_[3] + b5 * k_[4] + b6 * k_[5]);
        rhs(next_, k_[6]);
        stage_ = h * (e1 * k_[0] + e3 * k_[2] + e4 * k_[3] + e5 * k_[4] + e6 * k_[5] + e7 * k_[6]);
        // |re| + |im| summed over entries bounds the entrywise l1 norm, which bounds the trace norm.
        return stage_.real().cwiseAbs().sum() + stage_.imag().cwiseAbs().sum();
    }

    int dim_;
    IntegratorOptions options_;
    IntegratorStats* stats_;
    std::vector<double> sqrt_level_;
    std::array<Eigen::MatrixXcd, 7> k_;
    Eigen::MatrixXcd stage_, next_;
    double omega_ = 0.0, gamma_ = 0.0;
    double scaled_step_ = 0.0;
    long steps_ = 0;
};

} // namespace

FockDensityMatrix evolve_constant(const FockDensityMatrix& rho0, double omega, double gamma, double t,
                                  const IntegratorOptions& options, IntegratorStats* stats) {
    if (!std::isfinite(t) || t < 0.0) throw InvalidParameter("evolve_constant: t must be finite and >= 0");
    LindbladStepper stepper(rho0.dim(), options, stats);
    Eigen::MatrixXcd rho = rho0.elements;
    stepper.advance(rho, omega, gamma, t);
    return FockDensityMatrix(std::move(rho));
}

FockDensityMatrix evolve_trajectory(const FockDensityMatrix& rho0, const DriveSchedule& schedule,
                                    const IntegratorOptions& options, IntegratorStats* stats) {
    if (!(schedule.dt > 0.0)) throw InvalidParameter("evolve_trajectory: schedule dt must be > 0");
    LindbladStepper stepper(rho0.dim(), options, stats);
    Eigen::MatrixXcd rho = rho0.elements;
    for (const auto& seg : schedule.segments) stepper.advance(rho, seg.omega, seg.gamma, schedule.dt);
    return FockDensityMatrix(std::move(rho));
}

complex expectation(const FockDensityMatrix& rho, const Observable& which) {
    const int d = rho.dim();
    switch (which.kind) {
        case Observable::Kind::number: {
            complex sum = 0.0;
            for (int n = 1; n < d; ++n) sum += static_cast<double>(n) * rho.elements(n, n);
            return sum;
        }
        case Observable::Kind::annihilation: {
            // Tr(a rho) = sum_n sqrt(n+1) rho(n+1, n)
            complex sum = 0.0;
            for (int n = 0; n + 1 < d; ++n) sum += std::sqrt(static_cast<double>(n + 1)) * rho.elements(n + 1, n);
            return sum;
        }
        case Observable::Kind::coherence: {
            const Eigen::VectorXcd a = coherent_vector(which.alpha_t, d);
            const Eigen::VectorXcd b = coherent_vector(-which.alpha_t, d);
            return a.dot(rho.elements * b);
        }
    }
    throw InvalidParameter("expectation: unknown observable");
}

double coherent_fidelity(const FockDensityMatrix& rho, complex beta) {
    Eigen::VectorXcd v = coherent_vector(beta, rho.dim());
    v /= v.norm();
    return v.dot(rho.elements * v).real();
}

complex extract_coherence_weight(const FockDensityMatrix& rho, complex alpha_t) {
    const Eigen::VectorXcd a = coherent_vector(alpha_t, rho.dim());
    const Eigen::VectorXcd b = coherent_vector(-alpha_t, rho.dim());
    const complex cross = a.dot(rho.elements * b);
    const complex diag = a.dot(rho.elements * a);
    const complex r = cross / diag;
    const double e = std::exp(-2.0 * std::norm(alpha_t));
    const double s = 1.0 + e * e;
    return (r * s - 2.0 * e) / (s - 2.0 * e * r);
}

EnsembleEstimate trajectory_ensemble(const FockDensityMatrix& rho0, const ModulationParams& params,
                                     double horizon, long trajectories, std::uint64_t master_seed,
                                     const Observable& which, const IntegratorOptions& options) {
    params.validate();
    if (trajectories < 2) throw InvalidParameter("trajectory_ensemble: need at least two trajectories");
    std::vector<complex> values(static_cast<std::size_t>(trajectories));
    std::vector<std::size_t> negatives(values.size());
    parallel_for(values.size(), [&](std::size_t k) {
        RandomStream rng(derive_seed(master_seed, k));
        const ModulationTrajectory traj = generate_trajectory(params, horizon, rng);
        const DriveSchedule schedule = make_drive_schedule(traj, params.omega0, params.gamma0);
        values[k] = expectation(evolve_trajectory(rho0, schedule, options), which);
        negatives[k] = traj.negative_steps;
    });
    MomentAccumulator<2> acc;
    EnsembleEstimate out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        acc.add({values[k].real(), values[k].imag()});
        out.negative_steps += negatives[k];
    }
    const double n = static_cast<double>(acc.count());
    out.mean = complex(acc.mean(0), acc.mean(1));
    out.std_error = std::sqrt((acc.covariance(0, 0) + acc.covariance(1, 1)) / n);
    out.trajectories = trajectories;
    return out;
}

} // namespace stochctl
