#pragma once

#include <stdexcept>
#include <string>

namespace stochctl {

/// Parameter outside the documented domain of an operation.
class InvalidParameter : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the support of a density or formula (e.g. t' < 0).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Moment-generating average that does not exist: Re(z) >= 1/tau.
class DivergenceError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Quadrature or integrator that failed to reach its tolerance.
class NonConvergence : public std::runtime_error {
  public:
    NonConvergence(const std::string& what, long evaluations, double achieved_error)
        : std::runtime_error(what + " (evaluations=" + std::to_string(evaluations) +
                             ", achieved_error=" + std::to_string(achieved_error) + ")"),
          evaluations_(evaluations), achieved_error_(achieved_error) {}

    long evaluations() const noexcept { return evaluations_; }
    double achieved_error() const noexcept { return achieved_error_; }

  private:
    long evaluations_;
    double achieved_error_;
};

/// Root solver could not bracket a sign change.
class NoRootError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Fock truncation too small for the requested state.
class TruncationError : public std::length_error {
  public:
    using std::length_error::length_error;
};

} // namespace stochctl
