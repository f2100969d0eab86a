#include "stochctl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "json.hpp"

#include "stochctl/averaging.hpp"
#include "stochctl/errors.hpp"
#include "stochctl/lindblad.hpp"
#include "stochctl/parallel.hpp"
#include "stochctl/rates.hpp"

namespace stochctl {

using nlohmann::ordered_json;

const char* artifact_version() noexcept { return STOCHCTL_VERSION; }

namespace {

void require_increasing(const std::vector<double>& grid, const char* name, bool allow_zero) {
    if (grid.empty()) throw InvalidParameter(std::string(name) + " must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = grid[i];
        if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0)) {
            throw InvalidParameter(std::string(name) + " values must be finite and " +
                                   (allow_zero ? ">= 0" : "> 0"));
        }
        if (i > 0 && !(v > grid[i - 1])) throw InvalidParameter(std::string(name) + " must be strictly increasing");
    }
}

std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ModulationParams params_for(const ExperimentConfig& c, double gamma0_tau, double sigma_gamma0 = 0.0) {
    return ModulationParams::with_default_step(c.gamma0, c.q_factor * c.gamma0, gamma0_tau / c.gamma0,
                                               sigma_gamma0 / c.gamma0);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

void ExperimentConfig::validate() const {
    if (!(q_factor > 0.0) || !std::isfinite(q_factor)) throw InvalidParameter("q must be finite and > 0");
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw InvalidParameter("gamma0 must be finite and > 0");
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) throw InvalidParameter("alpha must be finite");
    if (!std::isfinite(x_value)) throw InvalidParameter("x must be finite");
    if (samples < 100) throw InvalidParameter("samples must be >= 100");
    if (!(rel_tol > 1e-14 && rel_tol <= 1.0)) throw InvalidParameter("tol must lie in (1e-14, 1]");
    if (command == "fig1" || command == "fig2" || command == "fig3") require_increasing(tau_grid, "tau grid", true);
    if (command == "fig2") require_increasing(t_grid, "t grid", true);
    if (command == "fig3") require_increasing(sigma_list, "sigma list", true);
}

std::string ExperimentConfig::to_json() const {
    ordered_json j;
    j["command"] = command;
    j["q"] = q_factor;
    j["gamma0"] = gamma0;
    j["gamma0_tau"] = tau_grid;
    j["sigma_gamma0"] = sigma_list;
    j["alpha"] = {alpha.real(), alpha.imag()};
    j["x"] = x_value;
    j["gamma0_t"] = t_grid;
    j["samples"] = samples;
    j["seed"] = seed;
    j["tol"] = rel_tol;
    j["format"] = format == OutputFormat::csv ? "csv" : "json";
    return j.dump();
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw InvalidParameter("log_grid: need 0 < lo < hi, points >= 2");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < points; ++i) g[i] = std::pow(10.0, a + (b - a) * i / (points - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (!(hi > lo) || points < 2) throw InvalidParameter("linear_grid: need lo < hi, points >= 2");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
    g.back() = hi;
    return g;
}

ExperimentConfig default_config(const std::string& command) {
    ExperimentConfig c;
    c.command = command;
    if (command == "fig1" || command == "fig3") c.tau_grid = log_grid(1e-9, 1e4, 131);
    if (command == "fig2") {
        c.tau_grid = {0.0, 1.5, 20.0, 100.0};
        c.t_grid = linear_grid(0.0, 3.0, 121);
    }
    if (command == "fig3") c.sigma_list = {0.0, 1e-5, 1e-4};
    return c;
}

std::string visibility_column(double gamma0_tau) {
    if (gamma0_tau == 0.0) return "V_tau0";
    std::string s = format_g(gamma0_tau);
    std::replace(s.begin(), s.end(), '.', 'p');
    return "V_" + s;
}

std::string sigma_column(double sigma_gamma0) { return "ratio_sigma_" + format_g(sigma_gamma0); }

Dataset cmd_fig1(const ExperimentConfig& config) {
    config.validate();
    Dataset d;
    d.columns = {"gamma0_tau", "ratio_gamma", "ratio_gaussian"};
    for (double g : config.tau_grid) {
        const ModulationParams p = params_for(config, g);
        const double r = effective_field_rate(p).rate / config.gamma0;
        const double rg = gaussian_modulation_rate(p) / config.gamma0;
        d.rows.push_back({g, r, rg});
        d.status.push_back(std::isfinite(r) && std::isfinite(rg) ? "ok" : "nonfinite");
    }
    return d;
}

Dataset cmd_fig2(const ExperimentConfig& config) {
    config.validate();
    Dataset d;
    d.columns = {"gamma0_t"};
    for (double g : config.tau_grid) d.columns.push_back(visibility_column(g));
    const std::size_t n = config.t_grid.size();
    d.rows.assign(n, {});
    d.status.assign(n, "ok");
    parallel_for(n, [&](std::size_t i) {
        const double gt = config.t_grid[i];
        std::vector<double> row{gt};
        std::string status = "ok";
        for (std::size_t k = 0; k < config.tau_grid.size(); ++k) {
            try {
                const VisibilityResult r = averaged_visibility(config.alpha, config.x_value, gt / config.gamma0,
                                                               params_for(config, config.tau_grid[k]),
                                                               config.rel_tol);
                row.push_back(r.visibility);
                if (r.clamped && status == "ok") status = "clamped:" + d.columns[k + 1];
            } catch (const NonConvergence&) {
                row.push_back(kNaN);
                status = "nonconvergence:" + d.columns[k + 1];
            }
        }
        d.rows[i] = std::move(row);
        d.status[i] = std::move(status);
    });
    return d;
}

Dataset cmd_fig3(const ExperimentConfig& config) {
    config.validate();
    Dataset d;
    d.columns = {"gamma0_tau"};
    for (double s : config.sigma_list) d.columns.push_back(sigma_column(s));
    for (double g : config.tau_grid) {
        std::vector<double> row{g};
        bool finite = true;
        for (double s : config.sigma_list) {
            const double r = error_perturbed_field_rate(params_for(config, g, s)) / config.gamma0;
            finite = finite && std::isfinite(r);
            row.push_back(r);
        }
        d.rows.push_back(std::move(row));
        d.status.push_back(finite ? "ok" : "nonfinite");
    }
    return d;
}

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

namespace {

ValidationCheck make_check(std::string name, double measured, double tolerance, std::string detail) {
    const bool ok = std::isfinite(measured) && measured <= tolerance;
    return {std::move(name), measured, tolerance, ok, std::move(detail)};
}

ValidationCheck check_mgf(const ExperimentConfig& c) {
    const double g0 = c.gamma0, w0 = c.q_factor * c.gamma0;
    const complex zs[] = {complex(-g0, 0.0), complex(-0.5 * g0, -w0), complex(-2.0 * g0, 0.5 * w0)};
    double worst = 0.0;
    for (complex z : zs) {
        for (double gtau : {0.5, 10.0, 1000.0}) {
            for (double gt : {0.5, 2.0}) {
                const double tau = gtau / g0, t = gt / g0;
                const complex exact = gamma_mgf_average(z, t, tau);
                OscillationHint hint{std::abs(z.imag()), 0.0};
                hint.support = 60.0 / g0;
                const AverageEstimate q = gamma_average_quadrature(
                    [z](double tp) { return std::exp(z * tp); }, t, tau, c.rel_tol, hint);
                worst = std::max(worst, std::abs(q.value - exact) / std::abs(exact));
            }
        }
    }
    return make_check("mgf_vs_quadrature", worst, 1e-7,
                      "max relative error of averaged exp(z t') against (1 - z tau)^(-t/tau)");
}

ValidationCheck check_reparametrization(const ExperimentConfig& c, const IntegratorOptions& opt) {
    const int dim = std::max(minimum_dimension(c.alpha), 20);
    const FockDensityMatrix rho0 = build_cat_rho(c.alpha, dim);
    ModulationParams p = params_for(c, 0.1);
    p.dt = 0.01 / c.gamma0;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 3; ++k) {
        RandomStream rng(derive_seed(c.seed, 100 + k));
        const ModulationTrajectory traj = generate_trajectory(p, 0.2 / c.gamma0, rng);
        const FockDensityMatrix a =
            evolve_trajectory(rho0, make_drive_schedule(traj, p.omega0, p.gamma0), opt);
        const FockDensityMatrix b = evolve_constant(rho0, p.omega0, p.gamma0, traj.random_time, opt);
        worst = std::max(worst, (a.elements - b.elements).cwiseAbs().maxCoeff());
    }
    return make_check("reparametrization_identity", worst, 1e-8,
                      "max-norm distance between schedule-driven and random-time evolution, 3 schedules");
}

ValidationCheck check_monte_carlo(const ExperimentConfig& c) {
    const double g0 = c.gamma0, w0 = c.q_factor * c.gamma0;
    RandomStream rng(derive_seed(c.seed, 200));
    double worst = 0.0;
    for (double gtau : {0.5, 10.0}) {
        const double tau = gtau / g0, t = 1.0 / g0;
        for (complex z : {complex(-g0, 0.0), complex(-0.5 * g0, -w0)}) {
            const auto f = [z](double tp) { return std::exp(z * tp); };
            const AverageEstimate mc = gamma_average_monte_carlo(f, t, tau, c.samples, rng);
            const AverageEstimate q =
                gamma_average_quadrature(f, t, tau, c.rel_tol, OscillationHint{std::abs(z.imag()), 60.0 / g0});
            worst = std::max(worst, std::abs(mc.value - q.value) / mc.abs_error);
        }
    }
    return make_check("monte_carlo_vs_quadrature", worst, 3.0,
                      "max |MC - quadrature| in units of the MC standard error");
}

ValidationCheck check_cat(const ExperimentConfig& c, const IntegratorOptions& opt) {
    const int dim = std::max(minimum_dimension(c.alpha), 20);
    const FockDensityMatrix rho0 = build_cat_rho(c.alpha, dim);
    const double w0 = c.q_factor * c.gamma0;
    double worst = 0.0;
    for (double gt : {0.1, 0.5}) {
        const double t = gt / c.gamma0;
        const FockDensityMatrix r = evolve_constant(rho0, w0, c.gamma0, t, opt);
        const EvolvedCat cat = evolved_cat(c.alpha, t, w0, c.gamma0);
        const complex w = extract_coherence_weight(r, cat.label_t.alpha);
        worst = std::max(worst, std::abs(std::abs(w) - cat.coherence_weight) / cat.coherence_weight);
    }
    return make_check("lindblad_vs_analytic_cat", worst, 1e-7,
                      "relative error of the coherence weight recovered from the integrated state");
}

ValidationCheck check_threshold(const ExperimentConfig& c) {
    const ThresholdResult th = decay_threshold(c.q_factor, c.gamma0);
    const ModulationParams p = params_for(c, th.exact);
    const double dev = std::abs(effective_field_rate(p).rate / c.gamma0 - 1.0);
    return make_check("threshold_consistency", dev, 1e-9,
                      "|field rate / gamma0 - 1| at the exact threshold " + format_value(th.exact));
}

} // namespace

ValidationReport cmd_validate(const ExperimentConfig& config) {
    config.validate();
    IntegratorOptions opt;
    opt.tol = config.rel_tol * 1e-2;
    ValidationReport rep;
    const auto run = [&](const char* name, double tolerance, auto&& body) {
        try {
            rep.checks.push_back(body());
        } catch (const std::exception& e) {
            rep.checks.push_back({name, kNaN, tolerance, false, std::string("failed: ") + e.what()});
        }
    };
    run("mgf_vs_quadrature", 1e-7, [&] { return check_mgf(config); });
    run("reparametrization_identity", 1e-8, [&] { return check_reparametrization(config, opt); });
    run("monte_carlo_vs_quadrature", 3.0, [&] { return check_monte_carlo(config); });
    run("lindblad_vs_analytic_cat", 1e-7, [&] { return check_cat(config, opt); });
    run("threshold_consistency", 1e-9, [&] { return check_threshold(config); });
    return rep;
}

namespace {

void write_header(std::ostream& os, const ExperimentConfig& config) {
    os << "# command: " << config.command << '\n'
       << "# version: " << artifact_version() << '\n'
       << "# seed: " << config.seed << '\n'
       << "# config: " << config.to_json() << '\n';
}

ordered_json metadata(const ExperimentConfig& config) {
    ordered_json m;
    m["command"] = config.command;
    m["version"] = artifact_version();
    m["seed"] = config.seed;
    m["config"] = ordered_json::parse(config.to_json());
    return m;
}

} // namespace

void write_csv(std::ostream& os, const Dataset& data, const ExperimentConfig& config) {
    write_header(os, config);
    for (const auto& c : data.columns) os << c << ',';
    os << "status\n";
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        for (double v : data.rows[i]) os << format_value(v) << ',';
        os << data.status[i] << '\n';
    }
}

void write_json(std::ostream& os, const Dataset& data, const ExperimentConfig& config) {
    ordered_json j;
    j["metadata"] = metadata(config);
    j["columns"] = data.columns;
    ordered_json rows = ordered_json::array();
    for (const auto& r : data.rows) {
        ordered_json row = ordered_json::array();
        for (double v : r) row.push_back(std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr));
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    j["status"] = data.status;
    os << j.dump(2) << '\n';
}

void write_report(std::ostream& os, const ValidationReport& report, const ExperimentConfig& config) {
    ordered_json j;
    j["metadata"] = metadata(config);
    ordered_json checks = ordered_json::array();
    for (const auto& c : report.checks) {
        ordered_json e;
        e["name"] = c.name;
        e["measured"] = std::isfinite(c.measured) ? ordered_json(c.measured) : ordered_json(nullptr);
        e["tolerance"] = c.tolerance;
        e["passed"] = c.passed;
        e["detail"] = c.detail;
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    j["passed"] = report.passed();
    os << j.dump(2) << '\n';
}

} // namespace stochctl
