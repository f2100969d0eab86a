#include "stochctl/gauss_rules.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "stochctl/errors.hpp"

namespace stochctl {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights the
// squared first components of the normalized eigenvectors.
GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NonConvergence("golub_welsch: tridiagonal eigensolver failed", diag.size(), 0.0);
    }
    const auto n = diag.size();
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        const double v = solver.eigenvectors()(0, i);
        rule.weights[i] = v * v;
        total += rule.weights[i];
    }
    for (double& w : rule.weights) w /= total;
    return rule;
}

void require_order(int n) {
    if (n < 1) throw InvalidParameter("gauss rule: order must be >= 1 (got " + std::to_string(n) + ")");
}

} // namespace

GaussRule gauss_legendre(int n) {
    require_order(n);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
    for (int k = 1; k < n; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(diag, sub);
}

GaussRule gauss_jacobi_left(int n, double beta) {
    require_order(n);
    if (!(beta > -1.0)) throw InvalidParameter("gauss_jacobi_left: beta must be > -1");
    // Jacobi recurrence with alpha = 0.
    const double a = 0.0, b = beta;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
    diag(0) = (b - a) / (a + b + 2.0);
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        diag(k) = (b * b - a * a) / (s * (s + 2.0));
        const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
        const double den = s * s * (s + 1.0) * (s - 1.0);
        sub(k - 1) = std::sqrt(num / den);
    }
    return golub_welsch(diag, sub);
}

GaussRule gauss_laguerre(int n, double alpha) {
    require_order(n);
    if (!(alpha > -1.0)) throw InvalidParameter("gauss_laguerre: alpha must be > -1");
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
    for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + alpha + 1.0;
    for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(k * (k + alpha));
    return golub_welsch(diag, sub);
}

} // namespace stochctl
