#pragma once

#include <vector>

namespace stochctl {

/// Gauss rule whose weights are normalized to sum to one, so the rule
/// approximates the *average* of g under the rule's weight function.
/// Multiply by the weight function's total mass to get the integral.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre on [-1, 1] (mass 2).
GaussRule gauss_legendre(int n);

/// Gauss-Jacobi on [-1, 1] for weight (1 + x)^beta, beta > -1
/// (mass 2^(beta+1) / (beta+1)).
GaussRule gauss_jacobi_left(int n, double beta);

/// Generalized Gauss-Laguerre on [0, inf) for weight w^alpha e^-w,
/// alpha > -1 (mass Gamma(alpha + 1)).
GaussRule gauss_laguerre(int n, double alpha);

} // namespace stochctl
