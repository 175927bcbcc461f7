// tfac: experiment driver for the time-fractional Allen-Cahn solver.

#include "tfac/error.hpp"
#include "tfac/experiments.hpp"
#include "tfac/field_kernels.hpp"
#include "tfac/frac_kernels.hpp"
#include "tfac/soe.hpp"
#include "tfac/stepper.hpp"
#include "tfac/time_mesh.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tfac;

namespace {

struct Args {
    std::string command;
    std::string out = "out";
    int threads = 0;
    std::uint64_t seed = 1;
    std::optional<double> alpha;
    double sigma = 0.4;
    std::optional<double> gamma;
    std::optional<std::size_t> n_steps;
    std::vector<std::size_t> n_list{100, 200, 400, 800};
    std::size_t m1 = 128;
    std::optional<double> epsilon;
    std::optional<double> length;
    std::optional<double> final_time;
    std::vector<double> taus;
    std::string mesh = "uniform";
    std::vector<double> kappas{10.0, 100.0, 1000.0};
    double tau_min = 1e-3;
    double tau_max = 1e-1;
    bool enforce_restriction = false;
    std::string mode;
    double soe_eps = 1e-12;
    double soe_dt = 1e-12;
    double amplitude = 1e-3;
    std::vector<double> snapshots;
    bool continuous_eigenvalue = false;
    std::string forcing = "midpoint";
    double newton_tol = 1e-12;
    double fit_fraction = 0.01;
    double t0 = 0.01;
    std::size_t n0 = 30;
};

HistoryMode parse_mode(const std::string& s, HistoryMode fallback) {
    if (s.empty()) {
        return fallback;
    }
    if (s == "direct") {
        return HistoryMode::Direct;
    }
    if (s == "fast") {
        return HistoryMode::Fast;
    }
    throw Error(ErrorKind::Configuration, "unknown history mode '" + s + "'");
}

std::ofstream open_out(const Args& a, const std::string& name) {
    fs::create_directories(a.out);
    const fs::path p = fs::path(a.out) / name;
    std::ofstream os(p);
    require(static_cast<bool>(os), ErrorKind::Io, "cannot open " + p.string());
    return os;
}

NewtonOptions newton_of(const Args& a) {
    NewtonOptions n;
    n.tol_inf = a.newton_tol;
    return n;
}

int cmd_converge(const Args& a) {
    experiments::ConvergeConfig cfg;
    cfg.mc.alpha = a.alpha.value_or(0.6);
    cfg.mc.sigma = a.sigma;
    cfg.mc.epsilon = a.epsilon.value_or(0.1);
    cfg.mc.discrete_eigenvalue = !a.continuous_eigenvalue;
    if (a.forcing == "cell-average") {
        cfg.mc.sampling = experiments::ForcingSampling::CellAverage;
    } else {
        require(a.forcing == "midpoint", ErrorKind::Configuration,
                "forcing must be midpoint or cell-average");
    }
    cfg.gamma = a.gamma.value_or(2.0);
    cfg.T = a.final_time.value_or(1.0);
    cfg.Ns = a.n_list;
    cfg.M1 = a.m1;
    cfg.seed = a.seed;
    cfg.mode = parse_mode(a.mode, HistoryMode::Direct);
    cfg.soe = {a.soe_eps, a.soe_dt};
    cfg.newton = newton_of(a);
    const auto rows = experiments::run_converge(cfg);
    auto os = open_out(a, "errors.csv");
    experiments::write_converge_csv(rows, os);
    experiments::write_converge_csv(rows, std::cout);
    std::cout << "expected order " << std::min(1.0 + cfg.mc.alpha, cfg.gamma * cfg.mc.sigma)
              << '\n';
    return 0;
}

int cmd_maxbound(const Args& a) {
    experiments::MaxboundConfig cfg;
    cfg.alpha = a.alpha.value_or(0.7);
    if (!a.taus.empty()) {
        cfg.taus = a.taus;
    }
    cfg.T = a.final_time.value_or(40.0);
    cfg.L = a.length.value_or(cfg.L);
    cfg.M1 = a.m1;
    cfg.epsilon = a.epsilon.value_or(0.05);
    cfg.amplitude = a.amplitude;
    cfg.seed = a.seed;
    cfg.mode = parse_mode(a.mode, HistoryMode::Direct);
    cfg.soe = {a.soe_eps, a.soe_dt};
    cfg.newton = newton_of(a);
    const auto runs = experiments::run_maxbound(cfg);
    auto os = open_out(a, "maxbound.csv");
    experiments::write_maxbound_csv(runs, os);
    std::cout << "tau,bound,restriction_ok,peak_max_norm,exceeded\n";
    for (const auto& r : runs) {
        std::cout << r.tau << ',' << r.bound << ',' << r.restriction_ok << ',' << r.peak << ','
                  << r.exceeded << '\n';
    }
    return 0;
}

int cmd_singularity(const Args& a) {
    experiments::SingularityConfig cfg;
    cfg.alpha = a.alpha.value_or(0.7);
    cfg.gamma = a.gamma.value_or(3.0);
    cfg.N = a.n_steps.value_or(200);
    cfg.L = a.length.value_or(cfg.L);
    cfg.M1 = a.m1;
    cfg.epsilon = a.epsilon.value_or(0.05);
    cfg.amplitude = a.amplitude;
    cfg.seed = a.seed;
    cfg.fit_fraction = a.fit_fraction;
    cfg.newton = newton_of(a);
    const auto res = experiments::run_singularity(cfg);
    auto os = open_out(a, "singularity.csv");
    experiments::write_singularity_csv(res, os);
    std::cout << "slope " << res.slope << " (alpha-1 = " << cfg.alpha - 1.0 << ", "
              << res.fit_points << " points)\n";
    return 0;
}

experiments::CoarsenConfig coarsen_config(const Args& a) {
    experiments::CoarsenConfig cfg;
    cfg.alpha = a.alpha.value_or(0.7);
    cfg.T = a.final_time.value_or(40.0);
    cfg.L = a.length.value_or(cfg.L);
    cfg.M1 = a.m1;
    cfg.epsilon = a.epsilon.value_or(0.05);
    cfg.amplitude = a.amplitude;
    cfg.seed = a.seed;
    cfg.T0 = a.t0;
    cfg.N0 = a.n0;
    cfg.gamma = a.gamma.value_or(3.0);
    cfg.tau_uniform = a.taus.empty() ? 0.01 : a.taus.front();
    cfg.controller.kappa = a.kappas.empty() ? 1e3 : a.kappas.back();
    cfg.controller.tau_min = a.tau_min;
    cfg.controller.tau_max = a.tau_max;
    cfg.controller.enforce_restriction = a.enforce_restriction;
    cfg.mode = parse_mode(a.mode, HistoryMode::Fast);
    cfg.soe = {a.soe_eps, a.soe_dt};
    cfg.newton = newton_of(a);
    return cfg;
}

int cmd_coarsen(const Args& a) {
    auto cfg = coarsen_config(a);
    if (a.mesh == "adaptive") {
        cfg.tail = experiments::TailMesh::Adaptive;
    } else {
        require(a.mesh == "uniform", ErrorKind::Configuration, "mesh must be uniform or adaptive");
    }
    cfg.snapshot_times = a.snapshots;
    cfg.snapshot_dir = fs::path(a.out);
    const auto res = experiments::run_coarsen(cfg);
    auto os = open_out(a, "records.csv");
    write_records_csv(res.records, os);
    std::cout << "steps " << res.steps << "\nfinal_E " << res.records.back().E
              << "\nfinal_E_alpha " << res.records.back().E_alpha << "\npeak_max_norm "
              << res.peak << "\ndissipation_violations " << res.dissipation_violations
              << "\nsoe_nodes " << res.soe_nodes << "\nseconds " << res.seconds << '\n';
    return 0;
}

int cmd_adaptive(const Args& a) {
    auto base = coarsen_config(a);
    auto os = open_out(a, "adaptive.csv");
    os.precision(12);
    os << "strategy,kappa,steps,final_E,final_E_alpha,peak_max_norm,dissipation_violations,seconds\n";
    std::cout << "strategy,kappa,steps,final_E,seconds\n";
    auto emit = [&](const std::string& name, double kappa, const experiments::CoarsenResult& r) {
        os << name << ',' << kappa << ',' << r.steps << ',' << r.records.back().E << ','
           << r.records.back().E_alpha << ',' << r.peak << ',' << r.dissipation_violations
           << ',' << r.seconds << '\n';
        std::cout << name << ',' << kappa << ',' << r.steps << ',' << r.records.back().E << ','
                  << r.seconds << '\n';
        auto rs = open_out(a, "records_" + name + (kappa > 0 ? "_k" + std::to_string(
                                                                   static_cast<long>(kappa))
                                                             : std::string()) +
                                  ".csv");
        write_records_csv(r.records, rs);
    };
    for (const double kappa : a.kappas) {
        auto cfg = base;
        cfg.tail = experiments::TailMesh::Adaptive;
        cfg.controller.kappa = kappa;
        emit("adaptive", kappa, experiments::run_coarsen(cfg));
    }
    auto cfg = base;
    cfg.tail = experiments::TailMesh::Uniform;
    emit("uniform", 0.0, experiments::run_coarsen(cfg));
    return 0;
}

int cmd_verify_kernels(const Args& a) {
    const double alpha = a.alpha.value_or(0.5);
    const std::size_t N = a.n_steps.value_or(50);
    const TimeMesh mesh = build_random(a.final_time.value_or(1.0), N, a.seed);
    const frac::KernelTable table(mesh, alpha, {.with_doc = true, .with_dcc = true});
    auto os = open_out(a, "kernels.csv");
    os.precision(17);
    os << "n,k,a,q,theta,p,residual\n";
    double worst = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        for (std::size_t k = 1; k <= n; ++k) {
            const double r = std::max({std::abs(table.orthogonality_residual(n, k)),
                                       std::abs(table.mutual_orthogonality_residual(n, k)),
                                       std::abs(table.dco_residual(n, k)),
                                       std::abs(table.dcc_residual(n, k))});
            worst = std::max(worst, r / static_cast<double>(n));
            os << n << ',' << k << ',' << table.a(n)[n - k] << ',' << table.q(n)[n - k] << ','
               << table.theta(n)[n - k] << ',' << table.p(n)[n - k] << ',' << r << '\n';
        }
    }
    std::cout << "max residual / n " << worst << '\n';
    return 0;
}

int cmd_verify_soe(const Args& a) {
    const double alpha = a.alpha.value_or(0.5);
    const double T = a.final_time.value_or(1.0);
    const auto soe = SoeApprox::build(alpha, a.soe_eps, a.soe_dt, T);
    auto os = open_out(a, "soe.csv");
    os.precision(17);
    os << "t,omega,soe,error\n";
    for (const auto& s : soe.sample_grid(SoeApprox::kCertificationPoints)) {
        os << s.t << ',' << s.omega << ',' << s.soe << ',' << s.error << '\n';
    }
    std::cout << "nodes " << soe.size() << "\ncertified_error " << soe.certified_error()
              << "\nrefinement_depth " << soe.refinement_depth() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-fractional Allen-Cahn experiments"};
    Args a;
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    const std::vector<std::string> commands{"converge",       "maxbound",  "singularity",
                                            "coarsen",        "adaptive",  "verify-kernels",
                                            "verify-soe"};
    app.add_option("command", a.command, "experiment to run")
        ->required()
        ->check(CLI::IsMember(commands));
    app.add_option("--out", a.out, "output directory");
    app.add_option("--threads", a.threads, "threads for the field kernels (0: runtime default)");
    app.add_option("--seed", a.seed, "seed for meshes and initial data");
    app.add_option("--alpha", a.alpha, "fractional order");
    app.add_option("--sigma", a.sigma, "regularity of the manufactured solution");
    app.add_option("--gamma", a.gamma, "mesh grading");
    app.add_option("--n-steps", a.n_steps, "number of steps");
    app.add_option("--n-list", a.n_list, "step counts for converge")->delimiter(',');
    app.add_option("--m1", a.m1, "grid points per dimension");
    app.add_option("--epsilon", a.epsilon, "interface width");
    app.add_option("--length", a.length, "domain edge length");
    app.add_option("--final-time", a.final_time, "time horizon");
    app.add_option("--tau", a.taus, "uniform step(s)")->delimiter(',');
    app.add_option("--mesh", a.mesh, "coarsen tail mesh: uniform or adaptive");
    app.add_option("--kappa", a.kappas, "adaptivity level(s)")->delimiter(',');
    app.add_option("--tau-min", a.tau_min, "smallest adaptive step");
    app.add_option("--tau-max", a.tau_max, "largest adaptive step");
    app.add_flag("--enforce-restriction", a.enforce_restriction,
                 "clip adaptive steps by the maximum-bound restriction");
    app.add_option("--mode", a.mode, "history evaluation: direct or fast");
    app.add_option("--soe-eps", a.soe_eps, "sum-of-exponentials tolerance");
    app.add_option("--soe-dt", a.soe_dt, "sum-of-exponentials cutoff time");
    app.add_option("--amplitude", a.amplitude, "random initial data amplitude");
    app.add_option("--snapshots", a.snapshots, "snapshot times")->delimiter(',');
    app.add_flag("--continuous-eigenvalue", a.continuous_eigenvalue,
                 "manufactured forcing with 8 pi^2 instead of the grid eigenvalue");
    app.add_option("--forcing", a.forcing,
                   "manufactured forcing per step: midpoint or cell-average");
    app.add_option("--newton-tol", a.newton_tol, "Newton tolerance in the max norm");
    app.add_option("--fit-fraction", a.fit_fraction, "singularity fit window as a fraction of T");
    app.add_option("--t0", a.t0, "end of the graded start cell (coarsen)");
    app.add_option("--n0", a.n0, "graded steps in the start cell (coarsen)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        kernels::set_num_threads(a.threads);
        if (a.command == "converge") return cmd_converge(a);
        if (a.command == "maxbound") return cmd_maxbound(a);
        if (a.command == "singularity") return cmd_singularity(a);
        if (a.command == "coarsen") return cmd_coarsen(a);
        if (a.command == "adaptive") return cmd_adaptive(a);
        if (a.command == "verify-kernels") return cmd_verify_kernels(a);
        return cmd_verify_soe(a);
    } catch (const Error& e) {
        std::cerr << "tfac-error kind=" << to_string(e.kind()) << " message=\"" << e.what()
                  << "\"\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "tfac-error kind=internal message=\"" << e.what() << "\"\n";
        return 3;
    }
}
