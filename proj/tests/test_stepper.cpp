#include "tfac/bulk.hpp"
#include "tfac/error.hpp"
#include "tfac/frac_kernels.hpp"
#include "tfac/grid.hpp"
#include "tfac/random.hpp"
#include "tfac/soe.hpp"
#include "tfac/stepper.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace {

using tfac::GridField;
using tfac::GridSpec;
using tfac::HistoryMode;
using tfac::ModelConfig;
using tfac::Simulation;
using tfac::SimulationOptions;

const double kTwoPi = 2.0 * std::numbers::pi;

GridField noise(const GridSpec& g, double amp, std::uint64_t seed) {
    const tfac::CounterRng rng(seed, 3);
    GridField u(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
        u.storage()[p] = rng.uniform(p, -amp, amp);
    }
    return u;
}

SimulationOptions options_for(HistoryMode mode) {
    SimulationOptions o;
    o.mode = mode;
    return o;
}

ModelConfig coarsening_model(double alpha, std::size_t m1) {
    return ModelConfig{alpha, 0.05, GridSpec(kTwoPi, m1), {}};
}

TEST(Energy, ClosedFormCases) {
    const GridSpec g(1.0, 16);
    EXPECT_EQ(tfac::energy_original(GridField(g, 1.0), 0.1), 0.0);
    EXPECT_NEAR(tfac::energy_original(GridField(g, 0.0), 0.1), 0.25, 1e-15);
    for (std::uint64_t s = 1; s <= 5; ++s) {
        EXPECT_GE(tfac::energy_original(noise(g, 2.0, s), 0.3), 0.0);
    }
}

TEST(Energy, MemoryTermAndLengths) {
    const std::vector<double> q{0.5, 0.25};
    const std::vector<double> S{2.0, 4.0};
    // row[0] multiplies the newest entry.
    EXPECT_DOUBLE_EQ(tfac::variational_memory(q, S), 0.5 * (0.25 * 2.0 + 0.5 * 4.0));
    EXPECT_THROW((void)tfac::variational_memory(q, std::vector<double>{1.0}), tfac::Error);
}

TEST(Restriction, CoarseningGridValues) {
    const double h = kTwoPi / 128.0;
    const double b07 = tfac::max_bound_restriction(0.7, 1.0, h, 0.05);
    EXPECT_NEAR(b07, 0.1374, 5e-4);
    EXPECT_NEAR(b07, 0.14, 0.01);
    EXPECT_NEAR(tfac::max_bound_restriction(0.9, 1.0, h, 0.05), 0.36, 0.02);
}

TEST(Restriction, CoarseGridRegimeAndLimit) {
    for (double alpha : {0.3, 0.6, 0.9}) {
        const double want = std::pow(alpha * std::tgamma(1.0 + alpha) /
                                         (2.0 * std::pow(2.0, 1.0 - alpha)),
                                     1.0 / alpha);
        EXPECT_NEAR(tfac::max_bound_restriction(alpha, 1.0, 1.0, 0.1), want, 1e-14);
    }
    EXPECT_NEAR(tfac::max_bound_restriction(1.0 - 1e-9, 1.0, 1.0, 0.1), 0.5, 1e-6);
    // Larger ratios tighten the bound.
    EXPECT_LT(tfac::max_bound_restriction(0.5, 3.0, 0.1, 0.1),
              tfac::max_bound_restriction(0.5, 1.0, 0.1, 0.1));
}

TEST(Restriction, SolvabilityThreshold) {
    EXPECT_NEAR(tfac::solvability_threshold(0.5), std::pow(std::sqrt(std::numbers::pi), 2.0),
                1e-13);
    EXPECT_NEAR(tfac::solvability_threshold(1.0 - 1e-12), 2.0, 1e-9);
}

TEST(Simulation, WellMinimumIsStationary) {
    for (auto mode : {HistoryMode::Direct, HistoryMode::Fast}) {
        const auto model = coarsening_model(0.6, 16);
        Simulation sim(model, GridField(model.grid, 1.0), options_for(mode));
        if (mode == HistoryMode::Fast) {
            sim.set_soe(std::make_shared<const tfac::SoeApprox>(
                tfac::SoeApprox::build(0.6, 1e-12, 1e-12, 2.0)));
        }
        for (int k = 0; k < 10; ++k) {
            const auto& r = sim.step(0.1);
            EXPECT_EQ(r.E, 0.0);
            EXPECT_EQ(r.E_alpha, 0.0);
            EXPECT_EQ(r.dissipation, 0.0);
            EXPECT_EQ(r.max_norm, 1.0);
        }
        for (double x : sim.u().storage()) {
            EXPECT_EQ(x, 1.0);
        }
        for (double x : sim.v_last().storage()) {
            EXPECT_EQ(x, 0.0);
        }
    }
}

TEST(Simulation, ZeroIsStationary) {
    const auto model = coarsening_model(0.4, 16);
    Simulation sim(model, GridField(model.grid, 0.0));
    sim.run(tfac::build_graded(1.0, 20, 2.0));
    EXPECT_EQ(tfac::norm_inf(sim.u()), 0.0);
    EXPECT_NEAR(sim.last().E, 0.25 * kTwoPi * kTwoPi, 1e-12);
}

TEST(Simulation, InitialRecord) {
    const auto model = coarsening_model(0.7, 16);
    const auto u0 = noise(model.grid, 0.5, 1);
    const Simulation sim(model, u0);
    ASSERT_EQ(sim.records().size(), 1u);
    EXPECT_EQ(sim.last().n, 0u);
    EXPECT_EQ(sim.last().E_alpha, sim.last().E);
    EXPECT_DOUBLE_EQ(sim.last().E, tfac::energy_original(u0, 0.05));
}

// Recomputes the scheme from stored iterates: u^n - u^{n-1} = sum_k a^(n)_{n-k} v^{k-1/2}.
TEST(Simulation, IteratesSatisfyTheScheme) {
    const auto model = ModelConfig{0.5, 0.2, GridSpec(kTwoPi, 24), {}};
    Simulation sim(model, noise(model.grid, 0.9, 2));
    const auto mesh = tfac::build_random(2.0, 25, 4);
    std::vector<GridField> us{sim.u()};
    for (std::size_t n = 1; n <= mesh.num_steps(); ++n) {
        sim.step_to(mesh.t(n));
        us.push_back(sim.u());
    }
    const auto hist = sim.v_history();
    ASSERT_EQ(hist.size(), 25u);
    const double eps2 = 0.04;
    for (std::size_t n = 1; n <= 25; ++n) {
        const auto Du = tfac::laplacian_apply(us[n]);
        const auto Duo = tfac::laplacian_apply(us[n - 1]);
        const auto a = tfac::frac::a_row(mesh.points(), 0.5, n);
        double worst_v = 0.0;
        double worst_eq = 0.0;
        for (std::size_t p = 0; p < model.grid.size(); ++p) {
            const double un = us[n].storage()[p];
            const double uo = us[n - 1].storage()[p];
            const double v = 0.5 * eps2 * (Du.storage()[p] + Duo.storage()[p]) -
                             tfac::bulk::bulk_H(un, uo);
            worst_v = std::max(worst_v, std::abs(v - hist[n - 1][p]));
            double conv = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                conv += a[n - k] * hist[k - 1][p];
            }
            worst_eq = std::max(worst_eq, std::abs(un - uo - conv));
        }
        EXPECT_LE(worst_v, 1e-11) << "n=" << n;
        EXPECT_LE(worst_eq, 1e-11) << "n=" << n;
    }
}

// Energy law recomputed from records and S_n on an unforced run.
TEST(Simulation, VariationalEnergyDissipates) {
    for (double alpha : {0.4, 0.8}) {
        const auto model = coarsening_model(alpha, 32);
        Simulation sim(model, noise(model.grid, 0.8, 5));
        sim.run(tfac::build_graded_uniform(0.05, 10, 3.0, 1.5, 0.05));
        const auto& rec = sim.records();
        const auto S = sim.v_square_sums();
        const auto flags = tfac::check_dissipation(rec);
        for (std::size_t n = 1; n < rec.size(); ++n) {
            EXPECT_TRUE(flags[n]);
            const double tau = rec[n].tau;
            const double cell = tfac::frac::omega(1.0 + alpha, rec[n].t) -
                                tfac::frac::omega(1.0 + alpha, rec[n - 1].t);
            const double lhs =
                (rec[n].E_alpha - rec[n - 1].E_alpha) / tau + cell / (2.0 * tau) * S[n - 1];
            EXPECT_LE(lhs, 1e-9 * (1.0 + std::abs(rec[n - 1].E_alpha)) / tau);
            EXPECT_NEAR(lhs, rec[n].dissipation, 1e-8 * (1.0 + std::abs(rec[n].E_alpha)) / tau);
            EXPECT_LE(rec[n].E_alpha, rec[n - 1].E_alpha + 1e-12);
        }
    }
}

TEST(Simulation, NearUnitOrderMemoryApproachesStepWeightedSum) {
    const double alpha = 0.999;
    const auto model = coarsening_model(alpha, 32);
    Simulation sim(model, noise(model.grid, 0.8, 6));
    const auto mesh = tfac::build_graded_uniform(0.5, 5, 1.0, 2.0, 0.1);
    sim.run(mesh);
    const auto S = sim.v_square_sums();
    for (std::size_t n = 1; n <= mesh.num_steps(); ++n) {
        double classic = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            classic += 0.5 * mesh.step(k) * S[k - 1];
        }
        const auto& r = sim.records()[n];
        const double want = r.E + classic;
        EXPECT_LE(std::abs(r.E_alpha - want), 1e-3 * std::abs(want));
    }
}

TEST(Simulation, ForcedRunSkipsDissipation) {
    auto model = coarsening_model(0.5, 16);
    model.forcing = [](double, double, const GridSpec&, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.3);
    };
    Simulation sim(model, GridField(model.grid, 0.0));
    sim.step(0.1);
    sim.step(0.1);
    EXPECT_TRUE(std::isnan(sim.last().dissipation));
    for (bool ok : tfac::check_dissipation(sim.records())) {
        EXPECT_TRUE(ok);
    }
    // A constant force moves the constant state upward.
    EXPECT_GT(sim.u()(0, 0), 0.0);
}

TEST(Simulation, CaputoFormResidual) {
    const auto model = coarsening_model(0.6, 32);
    SimulationOptions opts;
    opts.track_caputo_residual = true;
    Simulation sim(model, noise(model.grid, 0.9, 7), opts);
    sim.run(tfac::build_random(1.0, 50, 3));
    for (std::size_t n = 1; n <= 50; ++n) {
        EXPECT_LE(sim.records()[n].caputo_residual, 10.0 * 1e-12) << "n=" << n;
    }
    Simulation still(model, GridField(model.grid, 1.0), opts);
    still.run(tfac::build_random(1.0, 10, 3));
    EXPECT_EQ(still.last().caputo_residual, 0.0);
}

TEST(Simulation, RestrictionFlagsAndRestrictedStep) {
    const auto model = coarsening_model(0.7, 128);
    Simulation sim(model, noise(model.grid, 1e-3, 8));
    EXPECT_TRUE(sim.step(0.1).restriction_ok);
    EXPECT_FALSE(sim.step(0.3).restriction_ok);
    const double r = sim.restricted_step(1.0);
    EXPECT_LT(r, 1.0);
    EXPECT_LE(r, tfac::max_bound_restriction(0.7, r / 0.3, model.grid.h(), 0.05));
    EXPECT_NEAR(r, tfac::max_bound_restriction(0.7, r / 0.3, model.grid.h(), 0.05), 1e-12);
    EXPECT_EQ(sim.restricted_step(0.01), 0.01);
}

TEST(Simulation, SolvabilityWarning) {
    const auto model = ModelConfig{0.5, 0.5, GridSpec(1.0, 8), {}};
    Simulation sim(model, GridField(model.grid, 0.0));
    EXPECT_FALSE(sim.step(1.0).solvability_warning);
    EXPECT_TRUE(sim.step(4.0).solvability_warning);
}

TEST(Simulation, FastFirstStepBitIdentical) {
    const auto model = coarsening_model(0.7, 32);
    const auto u0 = noise(model.grid, 0.3, 9);
    Simulation direct(model, u0);
    Simulation fast(model, u0, options_for(HistoryMode::Fast));
    fast.set_soe(std::make_shared<const tfac::SoeApprox>(
        tfac::SoeApprox::build(0.7, 1e-12, 1e-12, 1.0)));
    direct.step(0.1);
    fast.step(0.1);
    EXPECT_EQ(direct.u().storage(), fast.u().storage());
    EXPECT_EQ(direct.last().E_alpha, fast.last().E_alpha);
}

TEST(Simulation, FastTracksDirect) {
    const double alpha = 0.7;
    const auto model = coarsening_model(alpha, 24);
    const auto u0 = noise(model.grid, 0.5, 10);
    Simulation direct(model, u0);
    Simulation fast(model, u0, options_for(HistoryMode::Fast));
    fast.set_soe(std::make_shared<const tfac::SoeApprox>(
        tfac::SoeApprox::build(alpha, 1e-12, 1e-12, 10.0)));
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        direct.step(0.1);
        fast.step(0.1);
        for (std::size_t p = 0; p < model.grid.size(); ++p) {
            worst = std::max(worst, std::abs(direct.u().storage()[p] - fast.u().storage()[p]));
        }
    }
    EXPECT_LE(worst, 1e-8);
    EXPECT_NEAR(direct.last().E_alpha, fast.last().E_alpha, 1e-8);
}

TEST(Simulation, ConfigurationErrors) {
    const auto model = coarsening_model(0.5, 8);
    const GridField u0(model.grid, 0.0);
    {
        Simulation fast(model, u0, options_for(HistoryMode::Fast));
        EXPECT_THROW(fast.step(0.1), tfac::Error);
        EXPECT_THROW(fast.set_soe(std::make_shared<const tfac::SoeApprox>(
                         tfac::SoeApprox::build(0.6, 1e-10, 1e-6, 1.0))),
                     tfac::Error);
        fast.set_soe(std::make_shared<const tfac::SoeApprox>(
            tfac::SoeApprox::build(0.5, 1e-10, 1e-3, 1.0)));
        try {
            fast.step(1e-4);
            ADD_FAILURE() << "step below the cutoff accepted";
        } catch (const tfac::Error& e) {
            EXPECT_EQ(e.kind(), tfac::ErrorKind::Configuration);
        }
        fast.step(0.5);
        EXPECT_THROW(fast.step(0.6), tfac::Error);
    }
    EXPECT_THROW(Simulation(model, GridField(GridSpec(1.0, 8))), tfac::Error);
    EXPECT_THROW(Simulation(ModelConfig{1.2, 0.1, model.grid, {}}, u0), tfac::Error);
    Simulation sim(model, u0);
    EXPECT_THROW(sim.step(-0.1), tfac::Error);
    sim.step(0.2);
    EXPECT_THROW(sim.step_to(0.1), tfac::Error);
    EXPECT_THROW(sim.run(tfac::build_graded(1.0, 4, 1.0)), tfac::Error);
}

TEST(Simulation, RunContinuesAlongMeshPrefix) {
    const auto model = coarsening_model(0.5, 8);
    const auto mesh = tfac::build_graded(1.0, 6, 2.0);
    Simulation a(model, noise(model.grid, 0.4, 11));
    Simulation b(model, noise(model.grid, 0.4, 11));
    a.run(mesh);
    for (std::size_t k = 1; k <= 3; ++k) {
        b.step_to(mesh.t(k));
    }
    b.run(mesh);
    EXPECT_EQ(a.u().storage(), b.u().storage());
    EXPECT_EQ(b.n(), 6u);
}

TEST(Adaptive, LandsOnHorizonWithinLimits) {
    const auto model = coarsening_model(0.7, 32);
    Simulation sim(model, noise(model.grid, 0.5, 12));
    const tfac::AdaptiveController ctrl{100.0, 1e-3, 0.1, true};
    const auto steps = tfac::advance_adaptive(sim, ctrl, 2.0);
    EXPECT_EQ(sim.t(), 2.0);
    EXPECT_EQ(steps, sim.n());
    for (std::size_t n = 1; n + 1 < sim.records().size(); ++n) {
        const auto& r = sim.records()[n];
        EXPECT_LE(r.tau, 0.1 * (1.0 + 1e-12));
        EXPECT_GE(r.tau, 1e-3 * (1.0 - 1e-12));
        EXPECT_TRUE(r.restriction_ok);
    }
}

TEST(Records, CsvHeader) {
    const auto model = coarsening_model(0.5, 8);
    Simulation sim(model, GridField(model.grid, 0.0));
    sim.step(0.1);
    std::ostringstream os;
    tfac::write_records_csv(sim.records(), os);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')),
              "n,t,tau,E,E_alpha,max_norm,newton_iters,restriction_ok,dissipation,"
              "caputo_residual");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}

}  // namespace
