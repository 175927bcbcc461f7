#include "gauss_rules.hpp"

#include "tfac/error.hpp"

#include <Eigen/Eigenvalues>
#include <quadmath.h>

#include <cmath>

namespace tfac::detail {

namespace {

// P_n and P_{n-1} of the Jacobi family (a = 0, b) at x.
void jacobi_pair(std::size_t n, quad b, quad x, quad& pn, quad& pn1) {
    const quad a = 0;
    quad p0 = 1;
    quad p1 = ((a - b) + (a + b + 2) * x) / 2;
    if (n == 0) {
        pn = p0;
        pn1 = 0;
        return;
    }
    for (std::size_t k = 2; k <= n; ++k) {
        const quad kk = static_cast<quad>(k);
        const quad c = 2 * kk + a + b;
        const quad lhs = 2 * kk * (kk + a + b) * (c - 2);
        const quad p2 = ((c - 1) * (c * (c - 2) * x + a * a - b * b) * p1 -
                         2 * (kk + a - 1) * (kk + b - 1) * c * p0) /
                        lhs;
        p0 = p1;
        p1 = p2;
    }
    pn = p1;
    pn1 = p0;
}

quad jacobi_derivative(std::size_t n, quad b, quad x, quad pn, quad pn1) {
    const quad a = 0;
    const quad nn = static_cast<quad>(n);
    const quad c = 2 * nn + a + b;
    return (nn * ((a - b) - c * x) * pn + 2 * (nn + a) * (nn + b) * pn1) / (c * (1 - x * x));
}

}  // namespace

QuadRule gauss_jacobi_b(std::size_t n, double b) {
    require(n >= 1, ErrorKind::InvalidParameter, "Gauss rule needs at least one node");
    require(b > -1.0, ErrorKind::InvalidParameter, "Jacobi exponent must exceed -1");
    const double a = 0.0;

    // Golub-Welsch starting values.
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
    diag(0) = (b - a) / (a + b + 2.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double c = 2.0 * kk + a + b;
        diag(static_cast<Eigen::Index>(k)) = (b * b - a * a) / (c * (c + 2.0));
        const double beta = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) /
                            (c * c * (c + 1.0) * (c - 1.0));
        sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(beta);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    require(eig.info() == Eigen::Success, ErrorKind::ConstructionFailure,
            "Golub-Welsch eigenvalue solve failed");

    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const quad qb = b;
    const quad scale = powq(2, qb + 1);
    for (std::size_t i = 0; i < n; ++i) {
        quad x = eig.eigenvalues()(static_cast<Eigen::Index>(i));
        quad pn = 0;
        quad pn1 = 0;
        quad dp = 1;
        for (int it = 0; it < 20; ++it) {
            jacobi_pair(n, qb, x, pn, pn1);
            dp = jacobi_derivative(n, qb, x, pn, pn1);
            const quad dx = pn / dp;
            x -= dx;
            if (fabsq(dx) < 1e-33Q) {
                break;
            }
        }
        jacobi_pair(n, qb, x, pn, pn1);
        dp = jacobi_derivative(n, qb, x, pn, pn1);
        rule.nodes[i] = x;
        rule.weights[i] = scale / ((1 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace tfac::detail
