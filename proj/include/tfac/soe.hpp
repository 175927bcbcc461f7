#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tfac {

/// Sum-of-exponentials approximation of omega_alpha(t) on [dt, T]:
///
///     omega_alpha(t) ~= sum_l w_l exp(-s_l t),   w_l > 0, s_l > 0.
///
/// Built from omega_alpha(t) = sin(pi alpha)/pi * int_0^inf exp(-t s) s^(-alpha) ds:
/// Gauss-Jacobi on [0, 1/T] (absorbing s^(-alpha)), Gauss-Legendre on dyadic
/// bands up to the frequency where the truncated tail drops below tolerance,
/// and one extra high-frequency node that restores the integral of the kernel
/// over [0, dt]. That last node keeps the history recursion exact for the
/// most recent cell, where the argument of omega passes below dt.
///
/// Coefficients are generated and certified in binary128; nodes()/weights()
/// are their rounded double copies used by the time stepper.
class SoeApprox {
public:
    struct Sample {
        double t;
        double omega;
        double soe;
        double error;  // omega - soe, evaluated in binary128
    };

    /// Throws Error(ConstructionFailure) if certification fails at the
    /// deepest refinement level.
    static SoeApprox build(double alpha, double eps, double dt, double T);

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double tolerance() const noexcept { return eps_; }
    [[nodiscard]] double cutoff() const noexcept { return dt_; }
    [[nodiscard]] double horizon() const noexcept { return T_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

    /// Largest |omega - soe| over the certification grid.
    [[nodiscard]] double certified_error() const noexcept { return certified_error_; }
    /// Refinement level at which certification passed (0 = first attempt).
    [[nodiscard]] int refinement_depth() const noexcept { return depth_; }

    /// Sum evaluated in extended precision. Outside [dt, T] the value is
    /// defined but carries no accuracy guarantee.
    [[nodiscard]] long double eval(double t) const;
    /// omega_alpha(t) - soe(t), both sides in binary128.
    [[nodiscard]] double error_at(double t) const;

    /// `count` log-spaced points of [dt, T] (both endpoints included).
    [[nodiscard]] std::vector<Sample> sample_grid(std::size_t count) const;

    static constexpr std::size_t kCertificationPoints = 10000;

private:
    struct Coefficients;

    SoeApprox() = default;

    double alpha_ = 0.5;
    double eps_ = 0.0;
    double dt_ = 0.0;
    double T_ = 0.0;
    double certified_error_ = 0.0;
    int depth_ = 0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::shared_ptr<const Coefficients> exact_;
};

/// Advance one grid point's accumulators over a cell of length tau:
/// H_l <- exp(-s_l tau) H_l + v_mid (1 - exp(-s_l tau)) / s_l.
void history_update(std::span<double> H, double v_mid, double tau, const SoeApprox& soe);

/// (a0/tau) v_now - (1/tau) sum_l w_l (1 - exp(-s_l tau)) H_l(t_{n-1}).
[[nodiscard]] double fast_l1r_derivative(double a0_over_tau, double v_now,
                                         std::span<const double> H, const SoeApprox& soe,
                                         double tau);

/// Per-step coefficients shared by every grid point.
struct SoeStepCoefficients {
    std::vector<double> decay;    // exp(-s_l tau)
    std::vector<double> inject;   // (1 - exp(-s_l tau)) / s_l
    std::vector<double> history;  // w_l (1 - exp(-s_l tau))
};

[[nodiscard]] SoeStepCoefficients soe_step_coefficients(const SoeApprox& soe, double tau);

}  // namespace tfac
