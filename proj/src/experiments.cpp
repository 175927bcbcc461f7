#include "tfac/experiments.hpp"

#include "tfac/error.hpp"
#include "tfac/field_kernels.hpp"
#include "tfac/frac_kernels.hpp"
#include "tfac/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace tfac::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> phi_values(const GridSpec& grid) {
    const std::size_t m1 = grid.M1;
    std::vector<double> s(m1);
    for (std::size_t i = 0; i < m1; ++i) {
        s[i] = std::sin(2.0 * std::numbers::pi * grid.x(i));
    }
    std::vector<double> phi(grid.size());
    for (std::size_t i = 0; i < m1; ++i) {
        for (std::size_t j = 0; j < m1; ++j) {
            phi[i * m1 + j] = s[i] * s[j];
        }
    }
    return phi;
}

/// (1/tau) * integral over [t0, t0 + tau] of omega_mu.
double cell_average_omega(double mu, double t0, double tau) {
    return frac::omega_increment(mu + 1.0, t0, tau) / tau;
}

std::string time_label(double t) {
    std::ostringstream os;
    os << t;
    return os.str();
}

TimeMesh uniform_mesh(double tau, double T) {
    if (tau >= T) {
        return TimeMesh({0.0, T});
    }
    return build_graded_uniform(tau, 1, 1.0, T, tau);
}

Simulation make_simulation(double alpha, double epsilon, const GridSpec& grid, GridField u0,
                           HistoryMode mode, const NewtonOptions& newton,
                           std::shared_ptr<const SoeApprox> soe) {
    ModelConfig model;
    model.alpha = alpha;
    model.epsilon = epsilon;
    model.grid = grid;
    SimulationOptions opts;
    opts.mode = mode;
    opts.newton = newton;
    Simulation sim(model, std::move(u0), opts);
    if (mode == HistoryMode::Fast) {
        sim.set_soe(std::move(soe));
    }
    return sim;
}

}  // namespace

void ManufacturedCase::validate() const {
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidParameter, "alpha must lie in (0,1)");
    require(sigma > 0.0 && sigma < 1.0, ErrorKind::InvalidParameter, "sigma must lie in (0,1)");
    require(epsilon > 0.0, ErrorKind::InvalidParameter, "interface width must be positive");
}

double ManufacturedCase::eigenvalue(const GridSpec& grid) const {
    require(grid.L == 1.0, ErrorKind::InvalidParameter,
            "the manufactured solution lives on the unit square");
    if (!discrete_eigenvalue) {
        return 8.0 * std::numbers::pi * std::numbers::pi;
    }
    const double h = grid.h();
    const double s = std::sin(std::numbers::pi * h);
    return 8.0 * s * s / (h * h);
}

GridField ManufacturedCase::exact(double t, const GridSpec& grid) const {
    auto phi = phi_values(grid);
    const double w = frac::omega(1.0 + sigma, t);
    for (double& x : phi) {
        x *= w;
    }
    return GridField(grid, std::move(phi));
}

namespace {

/// lin * phi + cub * phi^3 at the grid points.
GridField forcing_field(double lin, double cub, const GridSpec& grid) {
    auto g = phi_values(grid);
    for (double& p : g) {
        p = lin * p + cub * p * p * p;
    }
    return GridField(grid, std::move(g));
}

double cubic_constant(double s) {
    return std::tgamma(1.0 + 3.0 * s) / std::pow(std::tgamma(1.0 + s), 3);
}

}  // namespace

GridField manufactured_forcing_cell_average(const ManufacturedCase& mc, double t0, double t1,
                                            const GridSpec& grid) {
    mc.validate();
    require(t0 >= 0.0 && t1 > t0, ErrorKind::InvalidParameter, "forcing cell needs 0 <= t0 < t1");
    const double tau = t1 - t0;
    const double a = mc.alpha;
    const double s = mc.sigma;
    const double lambda = mc.eigenvalue(grid);
    const double lin = cell_average_omega(s, t0, tau) +
                       (mc.epsilon * mc.epsilon * lambda - 1.0) * cell_average_omega(s + a, t0, tau);
    const double cub = cubic_constant(s) * cell_average_omega(3.0 * s + a, t0, tau);
    return forcing_field(lin, cub, grid);
}

GridField manufactured_forcing_at(const ManufacturedCase& mc, double t, const GridSpec& grid) {
    mc.validate();
    require(t > 0.0, ErrorKind::InvalidParameter, "forcing is singular at t = 0");
    const double a = mc.alpha;
    const double s = mc.sigma;
    const double lambda = mc.eigenvalue(grid);
    const double lin = frac::omega(s, t) +
                       (mc.epsilon * mc.epsilon * lambda - 1.0) * frac::omega(s + a, t);
    const double cub = cubic_constant(s) * frac::omega(3.0 * s + a, t);
    return forcing_field(lin, cub, grid);
}

ForcingProvider ManufacturedCase::forcing() const {
    const ManufacturedCase mc = *this;
    return [mc](double t0, double t1, const GridSpec& grid, std::span<double> out) {
        const GridField g = mc.sampling == ForcingSampling::Midpoint
                                ? manufactured_forcing_at(mc, 0.5 * (t0 + t1), grid)
                                : manufactured_forcing_cell_average(mc, t0, t1, grid);
        std::copy(g.storage().begin(), g.storage().end(), out.begin());
    };
}

GridField random_field(const GridSpec& grid, double amplitude, std::uint64_t seed) {
    require(amplitude >= 0.0, ErrorKind::InvalidParameter, "amplitude must be non-negative");
    const CounterRng rng(seed, 1);
    GridField u(grid);
    auto v = u.values();
    for (std::size_t p = 0; p < v.size(); ++p) {
        v[p] = rng.uniform(p, -amplitude, amplitude);
    }
    return u;
}

std::shared_ptr<const SoeApprox> make_soe(double alpha, const SoeSettings& s, double T) {
    return std::make_shared<const SoeApprox>(SoeApprox::build(alpha, s.tolerance, s.cutoff, T));
}

// ---- convergence --------------------------------------------------------

std::vector<ConvergeRow> run_converge(const ConvergeConfig& cfg) {
    cfg.mc.validate();
    require(!cfg.Ns.empty(), ErrorKind::InvalidParameter, "empty N list");
    const GridSpec grid(1.0, cfg.M1);
    const auto phi = phi_values(grid);
    std::shared_ptr<const SoeApprox> soe;
    if (cfg.mode == HistoryMode::Fast) {
        soe = make_soe(cfg.mc.alpha, cfg.soe, cfg.T);
    }

    std::vector<ConvergeRow> rows;
    for (const std::size_t N : cfg.Ns) {
        const TimeMesh mesh = build_graded_random(cfg.gamma, cfg.T, N, cfg.seed);
        ModelConfig model;
        model.alpha = cfg.mc.alpha;
        model.epsilon = cfg.mc.epsilon;
        model.grid = grid;
        model.forcing = cfg.mc.forcing();
        SimulationOptions opts;
        opts.mode = cfg.mode;
        opts.newton = cfg.newton;
        opts.track_variational_energy = false;
        Simulation sim(model, cfg.mc.exact(0.0, grid), opts);
        if (soe) {
            sim.set_soe(soe);
        }

        ConvergeRow row;
        row.N = N;
        row.tau_max = mesh.max_step();
        for (std::size_t k = 1; k <= mesh.num_steps(); ++k) {
            const auto& rec = sim.step_to(mesh.t(k));
            row.max_newton_iters = std::max(row.max_newton_iters, rec.newton_iters);
            const double w = frac::omega(1.0 + cfg.mc.sigma, mesh.t(k));
            const auto u = sim.u().values();
            double e = 0.0;
            for (std::size_t p = 0; p < u.size(); ++p) {
                e = std::max(e, std::abs(w * phi[p] - u[p]));
            }
            row.error = std::max(row.error, e);
        }
        row.order = rows.empty() ? kNaN
                                 : std::log(rows.back().error / row.error) /
                                       std::log(rows.back().tau_max / row.tau_max);
        rows.push_back(row);
    }
    return rows;
}

void write_converge_csv(std::span<const ConvergeRow> rows, std::ostream& os) {
    os.precision(10);
    os << "N,tau,error,order,max_newton_iters\n";
    for (const auto& r : rows) {
        os << r.N << ',' << r.tau_max << ',' << r.error << ',' << r.order << ','
           << r.max_newton_iters << '\n';
    }
}

// ---- maximum bound ------------------------------------------------------

std::vector<MaxboundRun> run_maxbound(const MaxboundConfig& cfg) {
    const GridSpec grid(cfg.L, cfg.M1);
    std::shared_ptr<const SoeApprox> soe;
    if (cfg.mode == HistoryMode::Fast) {
        soe = make_soe(cfg.alpha, cfg.soe, cfg.T);
    }
    std::vector<MaxboundRun> runs;
    for (const double tau : cfg.taus) {
        require(tau > 0.0, ErrorKind::InvalidParameter, "time steps must be positive");
        const TimeMesh mesh = uniform_mesh(tau, cfg.T);
        auto sim = make_simulation(cfg.alpha, cfg.epsilon, grid,
                                   random_field(grid, cfg.amplitude, cfg.seed), cfg.mode,
                                   cfg.newton, soe);
        sim.run(mesh);
        MaxboundRun run;
        run.tau = tau;
        run.bound = max_bound_restriction(cfg.alpha, 1.0, grid.h(), cfg.epsilon);
        run.records = sim.records();
        for (const auto& r : run.records) {
            run.restriction_ok = run.restriction_ok && r.restriction_ok;
            run.peak = std::max(run.peak, r.max_norm);
        }
        run.exceeded = run.peak > 1.0;
        runs.push_back(std::move(run));
    }
    return runs;
}

void write_maxbound_csv(std::span<const MaxboundRun> runs, std::ostream& os) {
    os.precision(17);
    os << "tau,n,t,max_norm,restriction_ok\n";
    for (const auto& run : runs) {
        for (const auto& r : run.records) {
            os << run.tau << ',' << r.n << ',' << r.t << ',' << r.max_norm << ','
               << (r.restriction_ok ? 1 : 0) << '\n';
        }
    }
}

// ---- initial singularity -------------------------------------------------

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::LengthMismatch,
            "slope fit needs two equally long series of length >= 2");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0 && y[i] > 0.0, ErrorKind::DomainError,
                "log-log fit needs positive data");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SingularityResult run_singularity(const SingularityConfig& cfg) {
    require(cfg.gamma >= 1.0, ErrorKind::InvalidParameter, "grading must be >= 1");
    require(cfg.fit_fraction > 0.0 && cfg.fit_fraction <= 1.0, ErrorKind::InvalidParameter,
            "fit fraction must lie in (0,1]");
    const GridSpec grid(cfg.L, cfg.M1);
    SingularityResult res;
    res.T = 1.0 / cfg.gamma;
    const TimeMesh mesh = build_graded(res.T, cfg.N, cfg.gamma);
    auto sim = make_simulation(cfg.alpha, cfg.epsilon, grid,
                               random_field(grid, cfg.amplitude, cfg.seed), HistoryMode::Direct,
                               cfg.newton, nullptr);
    const std::size_t q = cfg.M1 / 4;
    res.probes = {{q, q}, {q, 3 * q}, {3 * q, q}, {2 * q, 2 * q}};

    std::vector<double> fit_t, fit_r;
    std::vector<double> d(grid.size());
    for (std::size_t k = 1; k <= mesh.num_steps(); ++k) {
        sim.step_to(mesh.t(k));
        const double tau = mesh.step(k);
        const auto u = sim.u().values();
        const auto uo = sim.u_previous().values();
        for (std::size_t p = 0; p < d.size(); ++p) {
            d[p] = (u[p] - uo[p]) / tau;
        }
        const double tm = 0.5 * (mesh.t(k - 1) + mesh.t(k));
        res.t_mid.push_back(tm);
        res.rate_inf.push_back(kernels::max_abs(d));
        std::vector<double> at;
        for (const auto& pr : res.probes) {
            at.push_back(std::abs(d[pr[0] * cfg.M1 + pr[1]]));
        }
        res.rate_probe.push_back(std::move(at));
        if (tm <= cfg.fit_fraction * res.T) {
            fit_t.push_back(tm);
            fit_r.push_back(res.rate_inf.back());
        }
    }
    res.fit_points = fit_t.size();
    res.slope = loglog_slope(fit_t, fit_r);
    return res;
}

void write_singularity_csv(const SingularityResult& res, std::ostream& os) {
    os.precision(17);
    os << "t_mid,rate_inf";
    for (const auto& pr : res.probes) {
        os << ",rate_" << pr[0] << '_' << pr[1];
    }
    os << '\n';
    for (std::size_t i = 0; i < res.t_mid.size(); ++i) {
        os << res.t_mid[i] << ',' << res.rate_inf[i];
        for (double r : res.rate_probe[i]) {
            os << ',' << r;
        }
        os << '\n';
    }
}

// ---- coarsening ----------------------------------------------------------

CoarsenResult run_coarsen(const CoarsenConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const GridSpec grid(cfg.L, cfg.M1);
    std::shared_ptr<const SoeApprox> soe;
    if (cfg.mode == HistoryMode::Fast) {
        soe = make_soe(cfg.alpha, cfg.soe, cfg.T);
    }
    auto sim = make_simulation(cfg.alpha, cfg.epsilon, grid,
                               random_field(grid, cfg.amplitude, cfg.seed), cfg.mode, cfg.newton,
                               soe);
    if (cfg.snapshot_dir) {
        std::filesystem::create_directories(*cfg.snapshot_dir);
    }
    std::vector<double> pending = cfg.snapshot_times;
    std::sort(pending.begin(), pending.end());
    auto take_snapshots = [&] {
        while (!pending.empty() && sim.t() >= pending.front() * (1.0 - 1e-12)) {
            if (cfg.snapshot_dir) {
                const std::string stem = "snapshot_t" + time_label(pending.front());
                write_field_binary(sim.u(), *cfg.snapshot_dir / (stem + ".bin"));
                write_field_csv(sim.u(), *cfg.snapshot_dir / (stem + ".csv"));
            }
            pending.erase(pending.begin());
        }
    };
    take_snapshots();

    if (cfg.tail == TailMesh::Uniform) {
        const TimeMesh mesh = build_graded_uniform(cfg.T0, cfg.N0, cfg.gamma, cfg.T, cfg.tau_uniform);
        for (std::size_t k = 1; k <= mesh.num_steps(); ++k) {
            sim.step_to(mesh.t(k));
            take_snapshots();
        }
    } else {
        const TimeMesh graded = build_graded(cfg.T0, cfg.N0, cfg.gamma);
        for (std::size_t k = 1; k <= graded.num_steps(); ++k) {
            sim.step_to(graded.t(k));
            take_snapshots();
        }
        // Adaptive steps are cut to land on requested snapshot times.
        while (sim.t() < cfg.T) {
            const double next = pending.empty() ? cfg.T : std::min(cfg.T, pending.front());
            advance_adaptive(sim, cfg.controller, next);
            take_snapshots();
        }
    }

    CoarsenResult res;
    res.records = sim.records();
    res.steps = sim.n();
    const auto ok = check_dissipation(res.records);
    for (std::size_t i = 0; i < ok.size(); ++i) {
        const auto& r = res.records[i];
        res.peak = std::max(res.peak, r.max_norm);
        if (i > 0 && !std::isnan(r.dissipation)) {
            res.worst_dissipation =
                std::max(res.worst_dissipation,
                         r.dissipation / (1.0 + std::abs(res.records[i - 1].E_alpha)));
        }
        if (!ok[i]) {
            ++res.dissipation_violations;
        }
    }
    res.dissipation_ok = res.dissipation_violations == 0;
    res.soe_nodes = soe ? soe->size() : 0;
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace tfac::experiments
