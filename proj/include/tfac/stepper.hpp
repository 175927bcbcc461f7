#pragma once

#include "tfac/grid.hpp"
#include "tfac/soe.hpp"
#include "tfac/time_mesh.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace tfac {

/// Writes the cell average (1/tau) * integral over [t_prev, t_now] of g into `out`.
using ForcingProvider =
    std::function<void(double t_prev, double t_now, const GridSpec& grid, std::span<double> out)>;

struct ModelConfig {
    double alpha = 0.5;
    double epsilon = 0.1;  // interface width
    GridSpec grid;
    ForcingProvider forcing;  // empty: unforced

    void validate() const;
};

struct NewtonOptions {
    double tol_inf = 1e-12;
    int max_iters = 50;
    double linear_tol = 1e-14;  // relative residual of the CG solve
    int linear_max_iters = 2000;

    void validate() const;
};

enum class HistoryMode { Direct, Fast };

struct SimulationOptions {
    HistoryMode mode = HistoryMode::Direct;
    NewtonOptions newton;
    /// E_alpha, its dissipation check and the adaptive rate need the q rows;
    /// switching this off leaves E_alpha = E.
    bool track_variational_energy = true;
    /// Keep full increment history and a rows for the equivalent-form residual (O(N^2) memory).
    bool track_caputo_residual = false;
};

struct SolveRecord {
    std::size_t n = 0;
    double t = 0.0;
    double tau = 0.0;
    double E = 0.0;
    double E_alpha = 0.0;
    double max_norm = 0.0;
    int newton_iters = 0;
    bool restriction_ok = true;
    /// Left side of the per-step variational energy law; NaN when not applicable.
    double dissipation = std::numeric_limits<double>::quiet_NaN();
    /// Equivalent-form residual divided by theta^(n)_0; NaN unless tracked.
    double caputo_residual = std::numeric_limits<double>::quiet_NaN();
    /// Step at or above the unique-solvability threshold.
    bool solvability_warning = false;
};

/// h^2 sum F(u) - (eps^2/2) <u, D_h u>_h
[[nodiscard]] double energy_original(const GridField& u, double epsilon);

/// (1/2) sum_k q^(n)_{n-k} S_k with S_k = h^2 sum (v^{k-1/2})^2.
[[nodiscard]] double variational_memory(std::span<const double> q_row_n,
                                        std::span<const double> S);

/// [min{1/2, h^2/(2 eps^2)} * alpha * Gamma(1+alpha) / (1+r)^(1-alpha)]^(1/alpha)
[[nodiscard]] double max_bound_restriction(double alpha, double ratio, double h, double epsilon);

/// (2 Gamma(1+alpha))^(1/alpha): steps below it give a strictly convex step problem.
[[nodiscard]] double solvability_threshold(double alpha);

/// Per-record pass flags: dissipation <= 1e-10 (1 + |E_alpha^{n-1}|). Records
/// without a dissipation value (forced runs, n = 0) pass.
[[nodiscard]] std::vector<bool> check_dissipation(std::span<const SolveRecord> records);

void write_records_csv(std::span<const SolveRecord> records, std::ostream& os);

/// One time-stepping run of the scheme on a growing mesh.
class Simulation {
public:
    Simulation(ModelConfig model, GridField u0, SimulationOptions options = {});
    ~Simulation();
    Simulation(Simulation&&) noexcept;
    Simulation& operator=(Simulation&&) noexcept;

    /// Required before the first step in fast mode. Throws Configuration if
    /// the approximation order differs from the model.
    void set_soe(std::shared_ptr<const SoeApprox> soe);

    /// Advances one step of size tau and returns its record.
    const SolveRecord& step(double tau);
    /// Advances to the time point t_next > t().
    const SolveRecord& step_to(double t_next);

    /// Steps along `mesh`, whose leading points must equal those already taken.
    void run(const TimeMesh& mesh);

    [[nodiscard]] const ModelConfig& model() const noexcept;
    [[nodiscard]] const SimulationOptions& options() const noexcept;
    [[nodiscard]] std::size_t n() const noexcept;
    [[nodiscard]] double t() const noexcept;
    [[nodiscard]] std::span<const double> points() const noexcept;
    [[nodiscard]] TimeMesh mesh() const;

    [[nodiscard]] const GridField& u() const noexcept;
    [[nodiscard]] const GridField& u_previous() const noexcept;
    /// v^{n-1/2} of the last step (zero before the first step).
    [[nodiscard]] const GridField& v_last() const noexcept;
    /// Direct mode: v^{k-1/2} for k = 1..n. Empty in fast mode.
    [[nodiscard]] std::span<const std::vector<double>> v_history() const noexcept;
    /// S_k = h^2 sum (v^{k-1/2})^2, k = 1..n.
    [[nodiscard]] std::span<const double> v_square_sums() const noexcept;

    [[nodiscard]] const std::vector<SolveRecord>& records() const noexcept;
    [[nodiscard]] const SolveRecord& last() const noexcept;

    /// Largest step <= tau_proposed that satisfies the maximum-bound restriction
    /// with the ratio it would produce.
    [[nodiscard]] double restricted_step(double tau_proposed) const;

private:
    struct State;
    std::unique_ptr<State> s_;
};

/// Continues `sim` with adaptive steps until t = T. Returns the number of steps taken.
std::size_t advance_adaptive(Simulation& sim, const AdaptiveController& ctrl, double T);

}  // namespace tfac
