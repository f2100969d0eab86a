#include "stochctl/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stochctl/errors.hpp"
#include "stochctl/gauss_rules.hpp"
#include "stochctl/parallel.hpp"
#include "stochctl/rates.hpp"

namespace stochctl {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kLargeShape = 1e4;
constexpr double kCenteredShape = 10.0;
constexpr double kTailSigmas = 20.0;
constexpr int kInitialPanels = 16;
constexpr std::size_t kChunks = 64;

void check_time_args(double t, double tau) {
    if (!std::isfinite(t) || !std::isfinite(tau) || t < 0.0 || tau < 0.0) {
        throw InvalidParameter("gamma average: need finite t >= 0 and tau >= 0");
    }
}

std::vector<AverageEstimate> point_evaluation(const MultiIntegrand& f, std::size_t m, double t_prime,
                                              AverageMethod method) {
    std::vector<complex> buf(m);
    f(t_prime, buf);
    std::vector<AverageEstimate> out(m);
    for (std::size_t c = 0; c < m; ++c) out[c] = {buf[c], 0.0, method, 1};
    return out;
}

// log(1 + y) - y without cancellation for small |y|: with z = y / (2 + y),
// log1p(y) = 2 atanh(z) and 2z - y = -y^2 / (2 + y).
double log1pmx(double y) {
    if (std::abs(y) >= 0.5) return std::log1p(y) - y;
    const double z = y / (2.0 + y);
    const double z2 = z * z;
    double term = z * z2, series = 0.0;
    for (int k = 3; k < 60; k += 2) {
        const double add = term / k;
        series += add;
        if (std::abs(add) <= 1e-18 * std::abs(series)) break;
        term *= z2;
    }
    return -y * y / (2.0 + y) + 2.0 * series;
}

// lgamma(s) - [(s - 1/2) log s - s + log(2 pi) / 2] for s >= 10.
double stirling_correction(double s) {
    const double r = 1.0 / s, r2 = r * r;
    return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 * (1.0 / 1188 - r2 * 691.0 / 360360)))));
}

class GammaQuadrature {
  public:
    GammaQuadrature(const MultiIntegrand& f, std::size_t m, double t, double tau,
                    const QuadratureOptions& opt)
        : f_(f), m_(m), tau_(tau), shape_(t / tau), opt_(opt), buf_(m) {
        log_gamma_shape_ = std::lgamma(shape_);
        log_gamma_shape1_ = std::lgamma(shape_ + 1.0);
        if (shape_ >= kCenteredShape) {
            // Log-density at the mode m = s - 1, free of the O(s) cancellation in lgamma.
            mode_ = shape_ - 1.0;
            log_mode_density_ = mode_ * std::log1p(-1.0 / shape_) + 1.0 -
                                0.5 * std::log(2.0 * std::numbers::pi * shape_) - stirling_correction(shape_);
        }
    }

    std::vector<AverageEstimate> run() {
        if (shape_ <= kLargeShape && !strongly_oscillatory()) {
            std::vector<AverageEstimate> out;
            if (try_laguerre(out)) return out;
        }
        return adaptive();
    }

  private:
    struct Panel {
        double a, b;
        bool singular;
        std::vector<complex> value;
        std::vector<double> error;
        std::vector<double> l1;
    };

    bool strongly_oscillatory() const {
        const double cycles = opt_.hint.frequency * tau_ * (1.0 + std::sqrt(shape_));
        return cycles > 20.0;
    }

    std::vector<double> targets(const std::vector<complex>& value, const std::vector<double>& l1) const {
        std::vector<double> tgt(m_);
        for (std::size_t c = 0; c < m_; ++c) {
            tgt[c] = std::max(opt_.rel_tol * std::abs(value[c]), 64.0 * kEps * l1[c]);
        }
        return tgt;
    }

    bool try_laguerre(std::vector<AverageEstimate>& out) {
        std::vector<complex> previous;
        for (int n = 16; n <= 128; n *= 2) {
            const GaussRule rule = gauss_laguerre(n, shape_ - 1.0);
            std::vector<complex> value(m_, 0.0);
            std::vector<double> l1(m_, 0.0);
            for (int i = 0; i < n; ++i) {
                f_(tau_ * rule.nodes[i], buf_);
                for (std::size_t c = 0; c < m_; ++c) {
                    value[c] += rule.weights[i] * buf_[c];
                    l1[c] += rule.weights[i] * std::abs(buf_[c]);
                }
            }
            evaluations_ += n;
            if (!previous.empty()) {
                const auto tgt = targets(value, l1);
                bool ok = true;
                for (std::size_t c = 0; c < m_; ++c) ok = ok && std::abs(value[c] - previous[c]) <= tgt[c];
                if (ok) {
                    out.resize(m_);
                    for (std::size_t c = 0; c < m_; ++c) {
                        out[c] = {value[c], std::abs(value[c] - previous[c]), AverageMethod::quadrature,
                                  evaluations_};
                    }
                    return true;
                }
            }
            previous = std::move(value);
        }
        return false;
    }

    double log_density(double w) const {
        if (shape_ >= kCenteredShape) return log_mode_density_ + mode_ * log1pmx((w - mode_) / mode_);
        return (shape_ - 1.0) * std::log(w) - w - log_gamma_shape_;
    }

    void evaluate(Panel& p) {
        p.value.assign(m_, 0.0);
        p.error.assign(m_, 0.0);
        p.l1.assign(m_, 0.0);
        std::vector<complex> coarse(m_, 0.0);
        const double half = 0.5 * (p.b - p.a);
        auto accumulate = [&](const GaussRule& rule, std::vector<complex>& into, bool track_l1) {
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double w = p.a + half * (1.0 + rule.nodes[i]);
                // Singular panels carry w^(s-1) in the rule; regular ones the full density.
                const double log_weight = p.singular ? -w : log_density(w);
                const double weight = rule.weights[i] * std::exp(log_weight);
                if (weight == 0.0) continue;
                f_(tau_ * w, buf_);
                for (std::size_t c = 0; c < m_; ++c) {
                    into[c] += weight * buf_[c];
                    if (track_l1) p.l1[c] += weight * std::abs(buf_[c]);
                }
            }
            evaluations_ += static_cast<long>(rule.nodes.size());
        };
        if (p.singular) {
            accumulate(jacobi16_, coarse, false);
            accumulate(jacobi32_, p.value, true);
        } else {
            accumulate(legendre16_, coarse, false);
            accumulate(legendre32_, p.value, true);
        }
        // Singular: mass of w^(s-1)/Gamma(s) on [0, b] is b^s / Gamma(s+1).
        const double scale =
            p.singular ? std::exp(shape_ * std::log(p.b) - log_gamma_shape1_) : (p.b - p.a);
        for (std::size_t c = 0; c < m_; ++c) {
            p.value[c] *= scale;
            coarse[c] *= scale;
            p.l1[c] *= scale;
            p.error[c] = std::abs(p.value[c] - coarse[c]);
        }
    }

    std::vector<AverageEstimate> adaptive() {
        legendre16_ = gauss_legendre(16);
        legendre32_ = gauss_legendre(32);
        const double sd = std::sqrt(shape_);
        const double lo = shape_ > kTailSigmas * kTailSigmas ? shape_ - kTailSigmas * sd : 0.0;
        const double hi = shape_ + kTailSigmas * sd + 40.0;
        if (lo == 0.0) {
            jacobi16_ = gauss_jacobi_left(16, shape_ - 1.0);
            jacobi32_ = gauss_jacobi_left(32, shape_ - 1.0);
        }

        // Initial partition, refined inside the oscillation band.
        std::vector<std::pair<double, double>> pieces;
        const double width = (hi - lo) / kInitialPanels;
        const bool banded = opt_.hint.frequency > 0.0 && opt_.hint.support > 0.0;
        const double band_hi = banded ? opt_.hint.support / tau_ : 0.0;
        const double period = banded ? 2.0 * std::numbers::pi / (opt_.hint.frequency * tau_) : 0.0;
        for (int k = 0; k < kInitialPanels; ++k) {
            const double a = lo + k * width;
            const double b = k + 1 == kInitialPanels ? hi : lo + (k + 1) * width;
            const double cut = std::min(b, band_hi);
            if (banded && cut > a) {
                const double count = std::ceil((cut - a) / period);
                if (count * 48.0 > static_cast<double>(opt_.max_evaluations)) {
                    throw NonConvergence("gamma_average_quadrature: oscillation band needs " +
                                             std::to_string(count) + " panels, above the evaluation cap",
                                         0, std::numeric_limits<double>::infinity());
                }
                const auto n = static_cast<long>(count);
                const double step = (cut - a) / static_cast<double>(n);
                for (long j = 0; j < n; ++j) {
                    pieces.emplace_back(a + j * step, j + 1 == n ? cut : a + (j + 1) * step);
                }
                if (cut < b) pieces.emplace_back(cut, b);
            } else {
                pieces.emplace_back(a, b);
            }
        }

        std::vector<Panel> panels;
        panels.reserve(pieces.size());
        for (const auto& [a, b] : pieces) {
            Panel p{a, b, lo == 0.0 && a == 0.0, {}, {}, {}};
            evaluate(p);
            panels.push_back(std::move(p));
        }

        for (;;) {
            std::vector<complex> total(m_, 0.0);
            std::vector<double> err(m_, 0.0), l1(m_, 0.0);
            for (const auto& p : panels) {
                for (std::size_t c = 0; c < m_; ++c) {
                    total[c] += p.value[c];
                    err[c] += p.error[c];
                    l1[c] += p.l1[c];
                }
            }
            const auto tgt = targets(total, l1);
            bool converged = true;
            for (std::size_t c = 0; c < m_; ++c) converged = converged && err[c] <= tgt[c];
            if (converged) {
                std::vector<AverageEstimate> out(m_);
                for (std::size_t c = 0; c < m_; ++c) {
                    out[c] = {total[c], err[c], AverageMethod::quadrature, evaluations_};
                }
                return out;
            }
            if (evaluations_ >= opt_.max_evaluations) {
                double worst = 0.0;
                for (std::size_t c = 0; c < m_; ++c) {
                    worst = std::max(worst, err[c] / std::max(std::abs(total[c]), 1e-300));
                }
                throw NonConvergence("gamma_average_quadrature: t/tau=" + std::to_string(shape_) +
                                         ", panels=" + std::to_string(panels.size()),
                                     evaluations_, worst);
            }
            const double n = static_cast<double>(panels.size());
            std::vector<Panel> next;
            next.reserve(panels.size() * 2);
            bool any_split = false;
            for (auto& p : panels) {
                bool split = false;
                // A panel whose 16/32 difference is at rounding level is resolved. The
                // integrand itself is only good to eps times the phase it reaches.
                const double floor = 64.0 * kEps * (1.0 + opt_.hint.frequency * tau_ * p.b);
                for (std::size_t c = 0; c < m_ && !split; ++c) {
                    split = p.error[c] * n > tgt[c] && p.error[c] > floor * p.l1[c];
                }
                if (!split) {
                    next.push_back(std::move(p));
                    continue;
                }
                any_split = true;
                const double mid = 0.5 * (p.a + p.b);
                Panel left{p.a, mid, p.singular, {}, {}, {}};
                Panel right{mid, p.b, false, {}, {}, {}};
                evaluate(left);
                evaluate(right);
                next.push_back(std::move(left));
                next.push_back(std::move(right));
            }
            panels = std::move(next);
            if (!any_split) {
                // Every panel is at its rounding floor: the remaining estimate is noise.
                std::vector<AverageEstimate> out(m_);
                for (std::size_t c = 0; c < m_; ++c) {
                    out[c] = {total[c], err[c], AverageMethod::quadrature, evaluations_};
                }
                return out;
            }
        }
    }

    const MultiIntegrand& f_;
    std::size_t m_;
    double tau_;
    double shape_;
    QuadratureOptions opt_;
    std::vector<complex> buf_;
    double log_gamma_shape_ = 0.0;
    double log_gamma_shape1_ = 0.0;
    double mode_ = 0.0;
    double log_mode_density_ = 0.0;
    long evaluations_ = 0;
    GaussRule legendre16_, legendre32_, jacobi16_, jacobi32_;
};

// Tolerances looser than 1e-2 are accepted so validation can run degraded
// negative-control configurations.
void check_rel_tol(double rel_tol) {
    if (!(rel_tol > 1e-14 && rel_tol <= 1.0)) {
        throw InvalidParameter("gamma_average_quadrature: rel_tol must lie in (1e-14, 1]");
    }
}

} // namespace

std::vector<AverageEstimate> gamma_average_quadrature(const MultiIntegrand& f, std::size_t components,
                                                      double t, double tau,
                                                      const QuadratureOptions& options) {
    check_time_args(t, tau);
    check_rel_tol(options.rel_tol);
    if (t == 0.0) return point_evaluation(f, components, 0.0, AverageMethod::quadrature);
    if (tau == 0.0) return point_evaluation(f, components, t, AverageMethod::quadrature);
    GammaQuadrature quad(f, components, t, tau, options);
    return quad.run();
}

AverageEstimate gamma_average_quadrature(const ScalarIntegrand& f, double t, double tau, double rel_tol,
                                         OscillationHint hint) {
    const MultiIntegrand wrapped = [&f](double tp, std::span<complex> out) { out[0] = f(tp); };
    QuadratureOptions opt;
    opt.rel_tol = rel_tol;
    opt.hint = hint;
    return gamma_average_quadrature(wrapped, 1, t, tau, opt).front();
}

std::vector<AverageEstimate> gamma_average_monte_carlo(const MultiIntegrand& f, std::size_t components,
                                                       double t, double tau, long n_samples,
                                                       RandomStream& rng) {
    check_time_args(t, tau);
    if (n_samples < 100) throw InvalidParameter("gamma_average_monte_carlo: need at least 100 samples");
    if (t == 0.0 || tau == 0.0) {
        auto out = point_evaluation(f, components, t, AverageMethod::monte_carlo);
        for (auto& e : out) e.samples_or_nodes = n_samples;
        return out;
    }
    const GammaTimeDistribution dist(t, tau);
    const std::uint64_t master = rng.next_u64();
    const std::size_t chunks = std::min<std::size_t>(kChunks, static_cast<std::size_t>(n_samples));
    std::vector<std::vector<MomentAccumulator<2>>> partial(chunks, std::vector<MomentAccumulator<2>>(components));
    parallel_for(chunks, [&](std::size_t chunk) {
        const long begin = static_cast<long>(chunk) * n_samples / static_cast<long>(chunks);
        const long end = static_cast<long>(chunk + 1) * n_samples / static_cast<long>(chunks);
        RandomStream sub(derive_seed(master, chunk));
        const GammaSampler sampler(dist.shape(), dist.scale());
        std::vector<complex> buf(components);
        for (long i = begin; i < end; ++i) {
            f(sampler(sub), buf);
            for (std::size_t c = 0; c < components; ++c) partial[chunk][c].add({buf[c].real(), buf[c].imag()});
        }
    });
    std::vector<AverageEstimate> out(components);
    for (std::size_t c = 0; c < components; ++c) {
        MomentAccumulator<2> acc;
        for (std::size_t chunk = 0; chunk < chunks; ++chunk) acc.merge(partial[chunk][c]);
        const double n = static_cast<double>(acc.count());
        const double se = std::sqrt((acc.covariance(0, 0) + acc.covariance(1, 1)) / n);
        out[c] = {complex(acc.mean(0), acc.mean(1)), se, AverageMethod::monte_carlo, n_samples};
    }
    return out;
}

AverageEstimate gamma_average_monte_carlo(const ScalarIntegrand& f, double t, double tau, long n_samples,
                                          RandomStream& rng) {
    const MultiIntegrand wrapped = [&f](double tp, std::span<complex> out) { out[0] = f(tp); };
    return gamma_average_monte_carlo(wrapped, 1, t, tau, n_samples, rng).front();
}

double averaged_mean_photon(double n0, double t, const ModulationParams& params) {
    if (!(n0 >= 0.0) || !(t >= 0.0)) throw InvalidParameter("averaged_mean_photon: need n0 >= 0, t >= 0");
    return n0 * std::exp(-error_perturbed_energy_rate(params) * t);
}

complex averaged_field(complex alpha0, double t, const ModulationParams& params) {
    if (!(t >= 0.0)) throw InvalidParameter("averaged_field: need t >= 0");
    const double rate = error_perturbed_field_rate(params);
    const double freq = error_perturbed_field_frequency(params);
    return alpha0 * std::exp(complex(-0.5 * rate * t, -freq * t));
}

namespace {

VisibilityResult assemble_visibility(double t, double x, const ModulationParams& params, complex num,
                                     double dp, double dm) {
    VisibilityResult r;
    r.time = t;
    r.tau = params.tau;
    r.x_value = x;
    r.numerator_modulus = std::abs(num);
    r.denom_plus = dp;
    r.denom_minus = dm;
    r.visibility = r.numerator_modulus / std::sqrt(dp * dm);
    if (r.visibility > 1.0 + 1e-9) {
        r.visibility = 1.0;
        r.clamped = true;
    }
    return r;
}

MultiIntegrand visibility_multi(double x, complex alpha, const ModulationParams& params) {
    VisibilityIntegrand terms = visibility_integrands(x, alpha, params.omega0, params.gamma0);
    return [terms](double tp, std::span<complex> out) {
        const VisibilityTerms v = terms(tp);
        out[0] = v.numerator;
        out[1] = v.denom_plus;
        out[2] = v.denom_minus;
    };
}

void check_visibility_args(double x, double t, const ModulationParams& params) {
    params.validate();
    if (params.sigma != 0.0) {
        throw InvalidParameter("averaged_visibility: error-process averaging is not supported (sigma must be 0)");
    }
    if (!std::isfinite(x) || !std::isfinite(t) || t < 0.0) {
        throw InvalidParameter("averaged_visibility: need finite x and t >= 0");
    }
}

} // namespace

VisibilityResult averaged_visibility(complex alpha, double x, double t, const ModulationParams& params,
                                     double rel_tol) {
    check_visibility_args(x, t, params);
    const MultiIntegrand f = visibility_multi(x, alpha, params);
    QuadratureOptions opt;
    opt.rel_tol = rel_tol;
    // Oscillation at 2 omega0 (and omega0 for x != 0) with amplitude ~ |alpha| e^{-gamma0 t'/2}.
    opt.hint.frequency = 2.0 * params.omega0;
    opt.hint.support =
        2.0 * (25.0 + std::log(1.0 + std::norm(alpha) + std::abs(x) * std::abs(alpha))) / params.gamma0;
    const auto avg = gamma_average_quadrature(f, 3, t, params.tau, opt);
    VisibilityResult r = assemble_visibility(t, x, params, avg[0].value, avg[1].value.real(), avg[2].value.real());
    const double rel = (r.numerator_modulus > 0.0 ? avg[0].abs_error / r.numerator_modulus : 0.0) +
                       0.5 * avg[1].abs_error / r.denom_plus + 0.5 * avg[2].abs_error / r.denom_minus;
    r.abs_error = r.visibility * rel;
    r.evaluations = avg[0].samples_or_nodes;
    return r;
}

VisibilityMonteCarlo averaged_visibility_monte_carlo(complex alpha, double x, double t,
                                                     const ModulationParams& params, long n_samples,
                                                     RandomStream& rng) {
    check_visibility_args(x, t, params);
    if (n_samples < 100) throw InvalidParameter("averaged_visibility_monte_carlo: need at least 100 samples");
    const VisibilityIntegrand terms = visibility_integrands(x, alpha, params.omega0, params.gamma0);

    VisibilityMonteCarlo out;
    if (t == 0.0 || params.tau == 0.0) {
        const VisibilityTerms v = terms(t);
        out.result = assemble_visibility(t, x, params, v.numerator, v.denom_plus, v.denom_minus);
        out.result.evaluations = n_samples;
        out.numerator = {v.numerator, 0.0, AverageMethod::monte_carlo, n_samples};
        out.denom_plus = {v.denom_plus, 0.0, AverageMethod::monte_carlo, n_samples};
        out.denom_minus = {v.denom_minus, 0.0, AverageMethod::monte_carlo, n_samples};
        return out;
    }

    const GammaTimeDistribution dist(t, params.tau);
    const std::uint64_t master = rng.next_u64();
    std::vector<MomentAccumulator<4>> partial(kChunks);
    parallel_for(kChunks, [&](std::size_t chunk) {
        const long begin = static_cast<long>(chunk) * n_samples / static_cast<long>(kChunks);
        const long end = static_cast<long>(chunk + 1) * n_samples / static_cast<long>(kChunks);
        RandomStream sub(derive_seed(master, chunk));
        const GammaSampler sampler(dist.shape(), dist.scale());
        for (long i = begin; i < end; ++i) {
            const VisibilityTerms v = terms(sampler(sub));
            partial[chunk].add({v.numerator.real(), v.numerator.imag(), v.denom_plus, v.denom_minus});
        }
    });
    MomentAccumulator<4> acc;
    for (const auto& p : partial) acc.merge(p);

    const double n = static_cast<double>(acc.count());
    const complex num(acc.mean(0), acc.mean(1));
    const double dp = acc.mean(2), dm = acc.mean(3);
    out.result = assemble_visibility(t, x, params, num, dp, dm);
    out.result.evaluations = n_samples;

    // Delta method on V = |N| / sqrt(D+ D-).
    const double mod = std::abs(num);
    const double root = std::sqrt(dp * dm);
    const double v = mod / root;
    std::array<double, 4> grad{};
    if (mod > 0.0) {
        grad[0] = num.real() / (mod * root);
        grad[1] = num.imag() / (mod * root);
    }
    grad[2] = -0.5 * v / dp;
    grad[3] = -0.5 * v / dm;
    double var = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) var += grad[i] * grad[j] * acc.covariance(i, j);
    }
    out.std_error = std::sqrt(std::max(var, 0.0) / n);
    out.result.abs_error = out.std_error;
    out.numerator_re_stderr = std::sqrt(acc.covariance(0, 0) / n);
    out.numerator_im_stderr = std::sqrt(acc.covariance(1, 1) / n);
    out.numerator = {num, std::hypot(out.numerator_re_stderr, out.numerator_im_stderr), AverageMethod::monte_carlo,
                     n_samples};
    out.denom_plus = {dp, std::sqrt(acc.covariance(2, 2) / n), AverageMethod::monte_carlo, n_samples};
    out.denom_minus = {dm, std::sqrt(acc.covariance(3, 3) / n), AverageMethod::monte_carlo, n_samples};
    return out;
}

} // namespace stochctl
