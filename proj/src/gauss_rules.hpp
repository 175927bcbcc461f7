#pragma once

// Internal: Gauss rules in binary128, used to build certified SOE tables.

#include <cstddef>
#include <vector>

namespace tfac::detail {

using quad = __float128;

struct QuadRule {
    std::vector<quad> nodes;    // on [-1, 1], ascending
    std::vector<quad> weights;
};

/// n-point Gauss-Jacobi rule for the weight (1 + x)^b on [-1, 1], b > -1.
/// b = 0 gives Gauss-Legendre. Nodes from Golub-Welsch in double, polished
/// by Newton on the three-term recurrence in binary128.
[[nodiscard]] QuadRule gauss_jacobi_b(std::size_t n, double b);

[[nodiscard]] inline QuadRule gauss_legendre(std::size_t n) { return gauss_jacobi_b(n, 0.0); }

}  // namespace tfac::detail
