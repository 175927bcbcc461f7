#pragma once

// Data-parallel loops over periodic M1 x M1 fields (row-major, index i*M1 + j).
//
// Every kernel exists twice: the OpenMP version in tfac::kernels and a plain
// loop in tfac::kernels::serial kept as the reference for tests and the
// benchmark. Reductions combine per-row compensated partial sums in row
// order, so the parallel and serial results agree bit-for-bit regardless of
// the thread count.

#include <cstddef>
#include <span>
#include <vector>

namespace tfac::kernels {

/// Threads used by the parallel kernels (OpenMP builds); 0 keeps the runtime default.
void set_num_threads(int n);
[[nodiscard]] int num_threads();
[[nodiscard]] bool parallel_enabled();

/// out = (u_{i+1,j} + u_{i-1,j} + u_{i,j+1} + u_{i,j-1} - 4 u_{ij}) * inv_h2, periodic.
void laplacian(std::span<const double> u, std::span<double> out, std::size_t m1, double inv_h2);

/// sum_ij a_ij b_ij (unweighted; callers apply h^2).
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b, std::size_t m1);

/// sum_ij a_ij
[[nodiscard]] double sum(std::span<const double> a, std::size_t m1);

[[nodiscard]] double max_abs(std::span<const double> a);

/// out_p = sum_k coef[k] * history[k][p] over the supplied history fields.
void weighted_history_sum(std::span<const double> coef,
                          std::span<const std::vector<double>> history, std::span<double> out);

/// Accumulators are point-major: H[p * nq + l].
/// H_l <- decay_l H_l + inject_l v_p.
void soe_update(std::span<double> H, std::span<const double> v, std::span<const double> decay,
                std::span<const double> inject);

/// out_p = sum_l coef_l H[p * nq + l].
void soe_contract(std::span<const double> H, std::span<const double> coef, std::span<double> out);

/// soe_update followed by soe_contract in one pass over H.
void soe_update_contract(std::span<double> H, std::span<const double> v,
                         std::span<const double> decay, std::span<const double> inject,
                         std::span<const double> coef, std::span<double> out);

namespace serial {

void laplacian(std::span<const double> u, std::span<double> out, std::size_t m1, double inv_h2);
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b, std::size_t m1);
[[nodiscard]] double sum(std::span<const double> a, std::size_t m1);
[[nodiscard]] double max_abs(std::span<const double> a);
void weighted_history_sum(std::span<const double> coef,
                          std::span<const std::vector<double>> history, std::span<double> out);
void soe_update(std::span<double> H, std::span<const double> v, std::span<const double> decay,
                std::span<const double> inject);
void soe_contract(std::span<const double> H, std::span<const double> coef, std::span<double> out);
void soe_update_contract(std::span<double> H, std::span<const double> v,
                         std::span<const double> decay, std::span<const double> inject,
                         std::span<const double> coef, std::span<double> out);

}  // namespace serial

}  // namespace tfac::kernels
