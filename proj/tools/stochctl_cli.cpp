// stochctl: figure data and oracle validation for the modulated cavity.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "stochctl/errors.hpp"
#include "stochctl/experiment.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct Flags {
    std::optional<double> q;
    std::vector<double> tau;
    std::vector<double> sigma;
    std::optional<double> alpha_re, alpha_im, x, t_max, tol;
    std::optional<int> points;
    std::optional<long> samples;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
};

void add_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--q", f.q, "Quality factor omega0/gamma0 (default 100)");
    cmd->add_option("--tau", f.tau, "gamma0*tau value; repeatable, replaces the default grid");
    cmd->add_option("--sigma", f.sigma, "sigma*gamma0 value; repeatable (fig3)");
    cmd->add_option("--alpha-re", f.alpha_re, "Real part of the cat amplitude (default 0)");
    cmd->add_option("--alpha-im", f.alpha_im, "Imaginary part of the cat amplitude (default 2)");
    cmd->add_option("--x", f.x, "Quadrature value for the visibility (default 0)");
    cmd->add_option("--t-max", f.t_max, "Largest gamma0*t of the fig2 grid (default 3)");
    cmd->add_option("--points", f.points, "Grid size: gamma0*t points (fig2) or gamma0*tau points (fig1, fig3)")
        ->check(CLI::Range(2, 1000000));
    cmd->add_option("--samples", f.samples, "Monte-Carlo samples (validate)");
    cmd->add_option("--seed", f.seed, "Master seed");
    cmd->add_option("--tol", f.tol, "Relative quadrature tolerance (default 1e-8)");
    cmd->add_option("--out", f.out, "Output file (default stdout)");
    cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

stochctl::ExperimentConfig build_config(const std::string& command, const Flags& f) {
    using namespace stochctl;
    ExperimentConfig c = default_config(command);
    if (f.q) c.q_factor = *f.q;
    if (f.alpha_re) c.alpha.real(*f.alpha_re);
    if (f.alpha_im) c.alpha.imag(*f.alpha_im);
    if (f.x) c.x_value = *f.x;
    if (f.samples) c.samples = *f.samples;
    if (f.seed) c.seed = *f.seed;
    if (f.tol) c.rel_tol = *f.tol;
    c.output_path = f.out;
    c.format = f.format == "json" ? OutputFormat::json : OutputFormat::csv;
    if (command == "fig1" || command == "fig3") {
        if (f.points) c.tau_grid = log_grid(1e-9, 1e4, *f.points);
    }
    if (command == "fig2" && (f.t_max || f.points)) {
        c.t_grid = linear_grid(0.0, f.t_max.value_or(3.0), f.points.value_or(121));
    }
    if (!f.tau.empty()) c.tau_grid = f.tau;
    if (!f.sigma.empty()) c.sigma_list = f.sigma;
    c.validate();
    return c;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file " + path);
    os << text;
    if (!os.flush()) throw std::runtime_error("write failed for " + path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic control of cavity decoherence: figure data and oracle checks"};
    app.set_version_flag("--version", stochctl::artifact_version());
    app.require_subcommand(1);

    Flags flags;
    std::map<std::string, CLI::App*> commands;
    commands["fig1"] = app.add_subcommand("fig1", "Field decay ratio vs gamma0*tau with the Gaussian comparison");
    commands["fig2"] = app.add_subcommand("fig2", "Averaged cat visibility vs gamma0*t");
    commands["fig3"] = app.add_subcommand("fig3", "Field decay ratio with the Gaussian error process");
    commands["validate"] = app.add_subcommand("validate", "Run the oracle suite and print a JSON report");
    for (auto& [name, cmd] : commands) add_flags(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    std::string command;
    for (auto& [name, cmd] : commands) {
        if (cmd->parsed()) command = name;
    }

    try {
        const stochctl::ExperimentConfig config = build_config(command, flags);
        std::ostringstream os;
        if (command == "validate") {
            const stochctl::ValidationReport report = stochctl::cmd_validate(config);
            stochctl::write_report(os, report, config);
            emit(os.str(), config.output_path);
            return report.passed() ? 0 : kExitValidation;
        }
        const stochctl::Dataset data = command == "fig1"   ? stochctl::cmd_fig1(config)
                                       : command == "fig2" ? stochctl::cmd_fig2(config)
                                                           : stochctl::cmd_fig3(config);
        if (config.format == stochctl::OutputFormat::json) {
            stochctl::write_json(os, data, config);
        } else {
            stochctl::write_csv(os, data, config);
        }
        emit(os.str(), config.output_path);
        return 0;
    } catch (const stochctl::InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}
