#pragma once

#include "tfac/grid.hpp"
#include "tfac/soe.hpp"
#include "tfac/stepper.hpp"
#include "tfac/time_mesh.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace tfac::experiments {

/// How the forcing enters step n: g(t_{n-1/2}) or its average over the cell.
enum class ForcingSampling { Midpoint, CellAverage };

/// Exact solution u = omega_{1+sigma}(t) sin(2 pi x) sin(2 pi y) on the unit square.
struct ManufacturedCase {
    double alpha = 0.6;
    double sigma = 0.4;
    double epsilon = 0.1;
    /// Use the five-point eigenvalue of phi in the forcing instead of 8 pi^2,
    /// which makes the sampled exact solution solve the space-discrete problem.
    bool discrete_eigenvalue = true;
    /// Midpoint sampling leaves an O(tau_1^sigma) error in the first cells,
    /// which is what limits the graded-mesh rate to gamma * sigma.
    ForcingSampling sampling = ForcingSampling::Midpoint;

    void validate() const;
    /// lambda with -Delta phi = lambda phi (continuous or discrete as configured).
    [[nodiscard]] double eigenvalue(const GridSpec& grid) const;
    [[nodiscard]] GridField exact(double t, const GridSpec& grid) const;
    [[nodiscard]] ForcingProvider forcing() const;
};

/// (1/(t1 - t0)) * integral over [t0, t1] of g, sampled at the grid points.
[[nodiscard]] GridField manufactured_forcing_cell_average(const ManufacturedCase& mc, double t0,
                                                          double t1, const GridSpec& grid);

/// g(t) sampled at the grid points, t > 0.
[[nodiscard]] GridField manufactured_forcing_at(const ManufacturedCase& mc, double t,
                                                const GridSpec& grid);

/// Independent uniform draws in (-amplitude, amplitude) at every grid point.
[[nodiscard]] GridField random_field(const GridSpec& grid, double amplitude, std::uint64_t seed);

struct SoeSettings {
    double tolerance = 1e-12;
    double cutoff = 1e-12;
};

// ---- convergence --------------------------------------------------------

struct ConvergeRow {
    std::size_t N = 0;
    double tau_max = 0.0;
    double error = 0.0;
    double order = 0.0;  // NaN on the first row
    int max_newton_iters = 0;
};

struct ConvergeConfig {
    ManufacturedCase mc;
    double gamma = 2.0;
    double T = 1.0;
    std::vector<std::size_t> Ns{100, 200, 400, 800};
    std::size_t M1 = 128;
    std::uint64_t seed = 1;
    HistoryMode mode = HistoryMode::Direct;
    SoeSettings soe;
    NewtonOptions newton;
};

[[nodiscard]] std::vector<ConvergeRow> run_converge(const ConvergeConfig& cfg);
void write_converge_csv(std::span<const ConvergeRow> rows, std::ostream& os);

// ---- maximum bound ------------------------------------------------------

struct MaxboundConfig {
    double alpha = 0.7;
    std::vector<double> taus{0.1, 0.8, 1.0};
    double T = 40.0;
    double L = 6.283185307179586;
    std::size_t M1 = 128;
    double epsilon = 0.05;
    double amplitude = 1e-3;
    std::uint64_t seed = 1;
    HistoryMode mode = HistoryMode::Direct;
    SoeSettings soe;
    NewtonOptions newton;
};

struct MaxboundRun {
    double tau = 0.0;
    double bound = 0.0;  // restriction at ratio 1
    bool restriction_ok = true;
    bool exceeded = false;  // any max norm > 1
    double peak = 0.0;      // largest max norm over the run
    std::vector<SolveRecord> records;
};

[[nodiscard]] std::vector<MaxboundRun> run_maxbound(const MaxboundConfig& cfg);
void write_maxbound_csv(std::span<const MaxboundRun> runs, std::ostream& os);

// ---- initial singularity -------------------------------------------------

struct SingularityConfig {
    double alpha = 0.7;
    double gamma = 3.0;
    std::size_t N = 200;
    double L = 6.283185307179586;
    std::size_t M1 = 128;
    double epsilon = 0.05;
    double amplitude = 1e-3;
    std::uint64_t seed = 1;
    /// Fit window: midpoints t_{n-1/2} <= fit_fraction * T.
    double fit_fraction = 0.01;
    NewtonOptions newton;
};

struct SingularityResult {
    double T = 0.0;
    std::vector<double> t_mid;
    std::vector<double> rate_inf;  // max norm of the difference quotient
    std::vector<std::array<std::size_t, 2>> probes;
    std::vector<std::vector<double>> rate_probe;  // [step][probe], absolute values
    double slope = 0.0;
    std::size_t fit_points = 0;
};

[[nodiscard]] SingularityResult run_singularity(const SingularityConfig& cfg);
void write_singularity_csv(const SingularityResult& res, std::ostream& os);

/// Least-squares slope of log y against log x.
[[nodiscard]] double loglog_slope(std::span<const double> x, std::span<const double> y);

// ---- coarsening ----------------------------------------------------------

enum class TailMesh { Uniform, Adaptive };

struct CoarsenConfig {
    double alpha = 0.7;
    double T = 40.0;
    double L = 6.283185307179586;
    std::size_t M1 = 128;
    double epsilon = 0.05;
    double amplitude = 1e-3;
    std::uint64_t seed = 1;
    double T0 = 0.01;
    std::size_t N0 = 30;
    double gamma = 3.0;
    TailMesh tail = TailMesh::Uniform;
    double tau_uniform = 0.01;
    AdaptiveController controller;
    HistoryMode mode = HistoryMode::Fast;
    SoeSettings soe;
    NewtonOptions newton;
    std::vector<double> snapshot_times;
    std::optional<std::filesystem::path> snapshot_dir;
};

struct CoarsenResult {
    std::vector<SolveRecord> records;
    std::size_t steps = 0;
    bool dissipation_ok = true;
    std::size_t dissipation_violations = 0;
    double worst_dissipation = 0.0;  // largest scaled left side
    double peak = 0.0;
    std::size_t soe_nodes = 0;
    double seconds = 0.0;
};

[[nodiscard]] CoarsenResult run_coarsen(const CoarsenConfig& cfg);

/// Shared SOE construction for fast runs on [cutoff, T].
[[nodiscard]] std::shared_ptr<const SoeApprox> make_soe(double alpha, const SoeSettings& s,
                                                        double T);

}  // namespace tfac::experiments
