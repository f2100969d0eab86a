#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace stochctl {

using complex = std::complex<double>;

enum class OutputFormat { csv, json };

/// Inputs of every CLI command. Grids are dimensionless: tau_grid holds
/// gamma0*tau, sigma_list holds sigma*gamma0 and t_grid holds gamma0*t.
struct ExperimentConfig {
    std::string command;
    double q_factor = 100.0;
    double gamma0 = 1.0;
    std::vector<double> tau_grid;
    std::vector<double> sigma_list;
    complex alpha{0.0, 2.0};
    double x_value = 0.0;
    std::vector<double> t_grid;
    long samples = 100'000;
    std::uint64_t seed = 12345;
    double rel_tol = 1e-8;
    std::string output_path; ///< empty means standard output
    OutputFormat format = OutputFormat::csv;

    /// Throws InvalidParameter when a grid is empty or not strictly
    /// increasing or a scalar is out of range.
    void validate() const;
    /// Config as JSON text (single line, fixed key order).
    std::string to_json() const;
};

/// `points` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);
/// `points` evenly spaced values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, int points);

/// Defaults per command: fig1 uses gamma0*tau in [1e-9, 1e4] at ten points
/// per decade; fig2 uses gamma0*t in [0, 3] (121 points) and gamma0*tau in
/// {0, 1.5, 20, 100}; fig3 adds sigma*gamma0 in {0, 1e-5, 1e-4}.
ExperimentConfig default_config(const std::string& command);

struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> status; ///< one entry per row, "ok" or a failure tag
};

/// Column name for a fig2 curve: V_tau0, V_1p5, V_20, ...
std::string visibility_column(double gamma0_tau);
/// Column name for a fig3 curve: ratio_sigma_0, ratio_sigma_1e-05, ...
std::string sigma_column(double sigma_gamma0);

Dataset cmd_fig1(const ExperimentConfig& config);
Dataset cmd_fig2(const ExperimentConfig& config);
Dataset cmd_fig3(const ExperimentConfig& config);

struct ValidationCheck {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool passed() const;
};

/// Runs the oracle suite. config.rel_tol drives the quadrature tolerance and
/// (scaled by 1e-2) the integrator tolerance; each check's pass threshold is
/// fixed, so loosening rel_tol shows up as failed checks.
ValidationReport cmd_validate(const ExperimentConfig& config);

/// '#'-prefixed metadata block (command, version, seed, config) followed by
/// the header and rows. Values use %.17g.
void write_csv(std::ostream& os, const Dataset& data, const ExperimentConfig& config);
void write_json(std::ostream& os, const Dataset& data, const ExperimentConfig& config);
void write_report(std::ostream& os, const ValidationReport& report, const ExperimentConfig& config);

const char* artifact_version() noexcept;

} // namespace stochctl
