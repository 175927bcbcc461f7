#pragma once

#include "tfac/time_mesh.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tfac::frac {

/// Power kernel omega_mu(t) = t^(mu-1) / Gamma(mu).
///
/// t = 0 is accepted for mu >= 1 (value 1 for mu == 1, else 0); any other
/// t <= 0 is a domain error.
[[nodiscard]] double omega(double mu, double t);

/// omega_mu(y + d) - omega_mu(y) for mu > 1, y >= 0, d > 0, evaluated
/// without forming the two powers separately.
[[nodiscard]] double omega_increment(double mu, double y, double d);

/// Integral of omega_alpha over [t_{n-1}, t_n]: omega_{1+alpha}(t_n) - omega_{1+alpha}(t_{n-1}).
[[nodiscard]] double cell_integral_omega(std::span<const double> points, double alpha,
                                         std::size_t n);

// Rows are indexed by history offset: row[m] holds the kernel with
// subscript m = n - k, i.e. row[0] multiplies the newest value.

/// q^(n)_{n-k} = integral over [t_{k-1}, t_k] of omega_alpha(t_n - s), k = 1..n.
[[nodiscard]] std::vector<double> q_row(std::span<const double> points, double alpha,
                                        std::size_t n);

/// a^(n)_0 = q^(n)_0 and a^(n)_{n-k} = q^(n)_{n-k} - q^(n-1)_{n-k-1} for k < n.
[[nodiscard]] std::vector<double> a_row(std::span<const double> points, double alpha,
                                        std::size_t n);

/// Same as a_row when q^(n-1) is already at hand (reused by the stepper).
[[nodiscard]] std::vector<double> a_row_from_q(std::span<const double> q_n,
                                               std::span<const double> q_prev);

/// (1/tau_n) sum_k a^(n)_{n-k} v^{k-1/2}; v_mid[k-1] holds v^{k-1/2}.
[[nodiscard]] double l1r_derivative(std::span<const double> v_mid,
                                    std::span<const double> a_row_n, double tau_n);

/// sum_k q^(n)_{n-k} v^{k-1/2}; zero for an empty history.
[[nodiscard]] double frac_integral(std::span<const double> v_mid,
                                   std::span<const double> q_row_n);

/// All four kernel families on steps 1..N of a mesh.
///
/// a and q rows are always built. DOC rows (theta) cost O(N^3) in total and
/// DCC rows (p) likewise; both are optional and meant for verification.
class KernelTable {
public:
    struct Options {
        bool with_doc = true;
        bool with_dcc = false;
    };

    KernelTable(const TimeMesh& mesh, double alpha, Options options);
    KernelTable(const TimeMesh& mesh, double alpha) : KernelTable(mesh, alpha, Options{}) {}

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] const TimeMesh& mesh() const noexcept { return mesh_; }
    [[nodiscard]] bool has_doc() const noexcept { return !theta_.empty(); }
    [[nodiscard]] bool has_dcc() const noexcept { return !p_.empty(); }

    [[nodiscard]] std::span<const double> a(std::size_t n) const { return a_.at(n - 1); }
    [[nodiscard]] std::span<const double> q(std::size_t n) const { return q_.at(n - 1); }
    [[nodiscard]] std::span<const double> theta(std::size_t n) const;
    [[nodiscard]] std::span<const double> p(std::size_t n) const;

    /// sum_{j=k}^n theta^(n)_{n-j} a^(j)_{j-k} - delta_{nk}
    [[nodiscard]] double orthogonality_residual(std::size_t n, std::size_t k) const;
    /// sum_{j=k}^n a^(n)_{n-j} theta^(j)_{j-k} - delta_{nk}
    [[nodiscard]] double mutual_orthogonality_residual(std::size_t n, std::size_t k) const;
    /// sum_{j=k}^n q^(n)_{n-j} theta^(j)_{j-k} - 1
    [[nodiscard]] double dco_residual(std::size_t n, std::size_t k) const;
    /// sum_{j=k}^n p^(n)_{n-j} a^(j)_{j-k} - 1
    [[nodiscard]] double dcc_residual(std::size_t n, std::size_t k) const;

private:
    TimeMesh mesh_;
    double alpha_;
    std::size_t n_;
    std::vector<std::vector<double>> a_;
    std::vector<std::vector<double>> q_;
    std::vector<std::vector<double>> theta_;
    std::vector<std::vector<double>> p_;
};

/// theta^(n)_{n-j}, j = 1..n, from the recursion
/// theta^(n)_0 = 1/a^(n)_0, theta^(n)_{n-k} = -(1/a^(k)_0) sum_{j>k} theta^(n)_{n-j} a^(j)_{j-k}.
/// `a_rows[j-1]` must hold row j for j = 1..n.
[[nodiscard]] std::vector<double> doc_row(std::span<const std::vector<double>> a_rows,
                                          std::size_t n);

/// p^(n)_{n-j} with sum_{j=k}^n p^(n)_{n-j} a^(j)_{j-k} = 1 for every k.
[[nodiscard]] std::vector<double> dcc_row(std::span<const std::vector<double>> a_rows,
                                          std::size_t n);

}  // namespace tfac::frac
