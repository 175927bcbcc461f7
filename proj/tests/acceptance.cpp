// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include "tfac/experiments.hpp"
#include "tfac/frac_kernels.hpp"
#include "tfac/soe.hpp"
#include "tfac/stepper.hpp"
#include "tfac/time_mesh.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace ex = tfac::experiments;
namespace frac = tfac::frac;

struct Outcome {
    bool pass = false;
    std::string detail;
};

const double kTwoPi = 2.0 * std::numbers::pi;

// 1: kernel identities on random meshes.
Outcome kernel_identities() {
    double worst_scaled = 0.0;
    bool doc_ok = true;
    bool bound_ok = true;
    bool pd_ok = true;
    const std::size_t N = 50;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto mesh = tfac::build_random(1.0, N, seed);
        for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
            const frac::KernelTable t(mesh, alpha, {.with_doc = true, .with_dcc = true});
            for (std::size_t n = 1; n <= N; ++n) {
                for (std::size_t k = 1; k <= n; ++k) {
                    const double r = std::max({std::abs(t.orthogonality_residual(n, k)),
                                               std::abs(t.mutual_orthogonality_residual(n, k)),
                                               std::abs(t.dco_residual(n, k)),
                                               std::abs(t.dcc_residual(n, k))});
                    worst_scaled = std::max(worst_scaled, r / static_cast<double>(n));
                }
                const auto th = t.theta(n);
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    doc_ok = doc_ok && th[j] > th[j + 1];
                }
                doc_ok = doc_ok && th[n - 1] > 0.0;
                if (n >= 2) {
                    const double r = mesh.ratio(n);
                    const double lb = frac::omega(alpha, r + 1.0) /
                                      (frac::omega(1.0 + alpha, mesh.step(n)) *
                                       frac::omega(1.0 + alpha, 1.0));
                    bound_ok = bound_ok && th[0] - th[1] > lb;
                }
            }
            // Positive definiteness against a random sequence.
            std::vector<double> w(N + 1);
            for (std::size_t k = 1; k <= N; ++k) {
                w[k] = std::sin(1.7 * static_cast<double>(k * seed) + alpha);
            }
            double lhs = 0.0;
            double rhs = 0.0;
            const auto qN = t.q(N);
            for (std::size_t k = 1; k <= N; ++k) {
                const auto a = t.a(k);
                double conv = 0.0;
                double asum = 0.0;
                for (std::size_t j = 1; j <= k; ++j) {
                    conv += a[k - j] * w[j];
                    asum += a[k - j];
                }
                lhs += 2.0 * w[k] * conv;
                rhs += (qN[N - k] + asum) * w[k] * w[k];
            }
            pd_ok = pd_ok && rhs > 0.0 && lhs - rhs >= -1e-12 * static_cast<double>(N);
        }
    }
    std::ostringstream os;
    os << "max residual/n " << worst_scaled << ", DOC decreasing " << doc_ok
       << ", lower bound " << bound_ok << ", positive definite " << pd_ok;
    return {worst_scaled <= 1e-12 && doc_ok && bound_ok && pd_ok, os.str()};
}

// 2: SOE certificate and fast-vs-direct agreement.
Outcome soe_and_fast() {
    std::ostringstream os;
    bool ok = true;
    for (double alpha : {0.4, 0.8}) {
        const auto soe = tfac::SoeApprox::build(alpha, 1e-12, 1e-12, 40.0);
        double worst = 0.0;
        for (const auto& s : soe.sample_grid(tfac::SoeApprox::kCertificationPoints)) {
            worst = std::max(worst, std::abs(s.error));
        }
        ok = ok && worst <= 1e-12;
        os << "alpha " << alpha << ": Nq " << soe.size() << " sampled error " << worst << "; ";
    }
    const double alpha = 0.7;
    const tfac::GridSpec grid(kTwoPi, 64);
    const tfac::ModelConfig model{alpha, 0.05, grid, {}};
    const auto u0 = ex::random_field(grid, 1e-3, 1);
    tfac::Simulation direct(model, u0);
    tfac::SimulationOptions fo;
    fo.mode = tfac::HistoryMode::Fast;
    tfac::Simulation fast(model, u0, fo);
    fast.set_soe(ex::make_soe(alpha, {}, 40.0));
    double diff = 0.0;
    for (std::size_t n = 1; n <= 400; ++n) {
        const double t = 0.1 * static_cast<double>(n);
        direct.step_to(t);
        fast.step_to(t);
        for (std::size_t p = 0; p < grid.size(); ++p) {
            diff = std::max(diff, std::abs(direct.u().storage()[p] - fast.u().storage()[p]));
        }
    }
    ok = ok && diff <= 1e-8;
    os << "fast vs direct max diff " << diff;
    return {ok, os.str()};
}

// 3: temporal convergence orders.
Outcome convergence() {
    struct Case {
        double alpha, sigma, gamma;
    };
    std::ostringstream os;
    bool ok = true;
    for (const Case c : {Case{0.6, 0.4, 2.0}, Case{0.6, 0.4, 4.0}, Case{0.8, 0.6, 2.0},
                         Case{0.8, 0.6, 3.0}}) {
        ex::ConvergeConfig cfg;
        cfg.mc.alpha = c.alpha;
        cfg.mc.sigma = c.sigma;
        cfg.gamma = c.gamma;
        cfg.Ns = {100, 200, 400, 800};
        cfg.M1 = 128;
        const auto rows = ex::run_converge(cfg);
        const double expected = std::min(1.0 + c.alpha, c.gamma * c.sigma);
        const double got = rows.back().order;
        const bool pass = std::abs(got - expected) <= 0.25;
        ok = ok && pass;
        os << "(a=" << c.alpha << ",s=" << c.sigma << ",g=" << c.gamma << ") order " << got
           << " vs " << expected << (pass ? "" : " OUT") << "; ";
    }
    return {ok, os.str()};
}

ex::CoarsenConfig coarsening(double alpha) {
    ex::CoarsenConfig cfg;
    cfg.alpha = alpha;
    cfg.T = 40.0;
    cfg.M1 = 128;
    cfg.tail = ex::TailMesh::Uniform;
    cfg.tau_uniform = 0.01;
    cfg.mode = tfac::HistoryMode::Fast;
    return cfg;
}

bool nonincreasing_E_alpha(const std::vector<tfac::SolveRecord>& r) {
    for (std::size_t n = 1; n < r.size(); ++n) {
        if (r[n].E_alpha > r[n - 1].E_alpha + 1e-10 * (1.0 + std::abs(r[n - 1].E_alpha))) {
            return false;
        }
    }
    return true;
}

// 4: energy law on long coarsening runs; keeps the alpha = 0.7 run for criterion 7.
Outcome dissipation(ex::CoarsenResult& uniform07) {
    std::ostringstream os;
    bool ok = true;
    for (double alpha : {0.4, 0.7, 0.9}) {
        auto res = ex::run_coarsen(coarsening(alpha));
        const bool mono = nonincreasing_E_alpha(res.records);
        ok = ok && res.dissipation_ok && mono;
        os << "alpha " << alpha << ": " << res.steps << " steps, violations "
           << res.dissipation_violations << ", worst scaled lhs " << res.worst_dissipation
           << ", E_alpha monotone " << mono << " (" << res.seconds << " s); ";
        if (alpha == 0.7) {
            uniform07 = std::move(res);
        }
    }
    return {ok, os.str()};
}

// 5: maximum bound under the step restriction.
Outcome maximum_bound() {
    const double h = kTwoPi / 128.0;
    const double b07 = tfac::max_bound_restriction(0.7, 1.0, h, 0.05);
    const double b09 = tfac::max_bound_restriction(0.9, 1.0, h, 0.05);
    ex::MaxboundConfig cfg;
    cfg.alpha = 0.7;
    cfg.taus = {0.1};
    cfg.T = 40.0;
    const auto runs = ex::run_maxbound(cfg);
    const auto& r = runs.front();
    const bool ok = std::abs(b07 - 0.14) <= 0.01 && std::abs(b09 - 0.36) <= 0.02 &&
                    r.restriction_ok && r.peak <= 1.0 + 1e-10;
    std::ostringstream os;
    os << "bound(0.7) " << b07 << ", bound(0.9) " << b09 << ", peak max norm " << r.peak
       << " over " << r.records.size() - 1 << " steps";
    return {ok, os.str()};
}

// 6: equivalent discrete Caputo form.
Outcome caputo_form() {
    const tfac::GridSpec grid(kTwoPi, 128);
    const tfac::ModelConfig model{0.7, 0.05, grid, {}};
    tfac::SimulationOptions opts;
    opts.track_caputo_residual = true;
    tfac::Simulation sim(model, ex::random_field(grid, 0.5, 3), opts);
    sim.run(tfac::build_random(1.0, 50, 3));
    double worst = 0.0;
    for (std::size_t n = 1; n < sim.records().size(); ++n) {
        worst = std::max(worst, sim.records()[n].caputo_residual);
    }
    std::ostringstream os;
    os << "max scaled residual " << worst << " over 50 steps";
    return {worst <= 1e-9, os.str()};
}

// 7: adaptive step counts and final energy.
Outcome adaptive(const ex::CoarsenResult& uniform) {
    std::vector<std::size_t> steps;
    double E_k1000 = 0.0;
    std::ostringstream os;
    bool peaks_ok = uniform.peak <= 1.0;
    for (double kappa : {10.0, 100.0, 1000.0}) {
        auto cfg = coarsening(0.7);
        cfg.tail = ex::TailMesh::Adaptive;
        cfg.controller.kappa = kappa;
        const auto res = ex::run_coarsen(cfg);
        steps.push_back(res.steps);
        E_k1000 = res.records.back().E;
        peaks_ok = peaks_ok && res.peak <= 1.0;
        os << "kappa " << kappa << ": " << res.steps << " steps, E(40) " << E_k1000 << " ("
           << res.seconds << " s); ";
    }
    const double E_uniform = uniform.records.back().E;
    const double rel = std::abs(E_k1000 - E_uniform) / std::abs(E_uniform);
    os << "uniform: " << uniform.steps << " steps, E(40) " << E_uniform << "; rel diff " << rel;
    const bool order =
        steps[0] < steps[1] && steps[1] < steps[2] && steps[2] < uniform.steps;
    return {order && rel <= 0.05 && peaks_ok, os.str()};
}

// 8: initial singularity slope.
Outcome singularity() {
    ex::SingularityConfig cfg;
    cfg.alpha = 0.7;
    cfg.gamma = 3.0;
    const auto res = ex::run_singularity(cfg);
    std::ostringstream os;
    os << "slope " << res.slope << " vs " << cfg.alpha - 1.0 << " from " << res.fit_points
       << " points";
    return {std::abs(res.slope - (cfg.alpha - 1.0)) <= 0.15 && res.fit_points >= 5, os.str()};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += o.pass ? 0 : 1;
        std::printf("criterion %d %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str(), s);
        std::fflush(stdout);
    };
    ex::CoarsenResult uniform07;
    report(1, kernel_identities);
    report(2, soe_and_fast);
    report(3, convergence);
    report(4, [&] { return dissipation(uniform07); });
    report(5, maximum_bound);
    report(6, caputo_form);
    report(7, [&] {
        if (uniform07.records.empty()) {
            uniform07 = ex::run_coarsen(coarsening(0.7));
        }
        return adaptive(uniform07);
    });
    report(8, singularity);
    return failures == 0 ? 0 : 1;
}
