#include "tfac/stepper.hpp"

#include "tfac/bulk.hpp"
#include "tfac/error.hpp"
#include "tfac/field_kernels.hpp"
#include "tfac/frac_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace tfac {

namespace {

constexpr std::size_t kParallelMin = 4096;

template <class F>
void for_each_point(std::size_t count, F&& f) {
#pragma omp parallel for schedule(static) if (count >= kParallelMin)
    for (std::size_t p = 0; p < count; ++p) {
        f(p);
    }
}

}  // namespace

void ModelConfig::validate() const {
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidParameter, "alpha must lie in (0,1)");
    require(epsilon > 0.0 && std::isfinite(epsilon), ErrorKind::InvalidParameter,
            "interface width must be positive");
    require(grid.M1 >= 2 && grid.L > 0.0, ErrorKind::InvalidParameter, "invalid grid");
}

void NewtonOptions::validate() const {
    require(tol_inf > 0.0, ErrorKind::InvalidParameter, "Newton tolerance must be positive");
    require(max_iters >= 1, ErrorKind::InvalidParameter, "Newton needs max_iters >= 1");
    require(linear_tol > 0.0 && linear_max_iters >= 1, ErrorKind::InvalidParameter,
            "invalid linear solver options");
}

double energy_original(const GridField& u, double epsilon) {
    const auto& g = u.spec();
    const double h2 = g.h() * g.h();
    const GridField lap = laplacian_apply(u);
    std::vector<double> F(u.size());
    const auto uv = u.values();
    for_each_point(F.size(), [&](std::size_t p) { F[p] = bulk::potential_F(uv[p]); });
    return h2 * kernels::sum(F, g.M1) -
           0.5 * epsilon * epsilon * h2 * kernels::dot(uv, lap.values(), g.M1);
}

double variational_memory(std::span<const double> q_row_n, std::span<const double> S) {
    require(q_row_n.size() == S.size(), ErrorKind::MissingHistory,
            "variational energy needs one squared-variation sum per step");
    return 0.5 * frac::frac_integral(S, q_row_n);
}

double max_bound_restriction(double alpha, double ratio, double h, double epsilon) {
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidParameter, "alpha must lie in (0,1)");
    require(ratio > 0.0 && h > 0.0 && epsilon > 0.0, ErrorKind::InvalidParameter,
            "restriction needs positive ratio, spacing and interface width");
    const double c = std::min(0.5, h * h / (2.0 * epsilon * epsilon));
    return std::pow(c * alpha * std::tgamma(1.0 + alpha) / std::pow(1.0 + ratio, 1.0 - alpha),
                    1.0 / alpha);
}

double solvability_threshold(double alpha) {
    return std::pow(2.0 * std::tgamma(1.0 + alpha), 1.0 / alpha);
}

std::vector<bool> check_dissipation(std::span<const SolveRecord> records) {
    std::vector<bool> ok(records.size(), true);
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double lhs = records[i].dissipation;
        if (std::isnan(lhs)) {
            continue;
        }
        ok[i] = lhs <= 1e-10 * (1.0 + std::abs(records[i - 1].E_alpha));
    }
    return ok;
}

void write_records_csv(std::span<const SolveRecord> records, std::ostream& os) {
    os.precision(17);
    os << "n,t,tau,E,E_alpha,max_norm,newton_iters,restriction_ok,dissipation,caputo_residual\n";
    for (const auto& r : records) {
        os << r.n << ',' << r.t << ',' << r.tau << ',' << r.E << ',' << r.E_alpha << ','
           << r.max_norm << ',' << r.newton_iters << ',' << (r.restriction_ok ? 1 : 0) << ','
           << r.dissipation << ',' << r.caputo_residual << '\n';
    }
}

struct Simulation::State {
    ModelConfig model;
    SimulationOptions opts;
    std::size_t m = 0;  // points per field
    double h2 = 0.0;
    double inv_h2 = 0.0;

    std::vector<double> points{0.0};
    GridField u, u_prev, v;
    std::vector<double> lap_u, lap_prev, rhs, res, diag, dx;
    std::vector<double> cg_r, cg_z, cg_p, cg_q;
    std::vector<double> forcing;
    std::vector<double> q_prev;
    std::vector<double> S;

    std::vector<std::vector<double>> v_hist;

    std::shared_ptr<const SoeApprox> soe;
    std::vector<double> H;  // point-major accumulators
    double pending_tau = 0.0;

    std::vector<std::vector<double>> a_rows;
    std::vector<std::vector<double>> w_hist;

    std::vector<SolveRecord> records;

    const SolveRecord& advance(double t_next);
    int newton(double a0, double c);
    int pcg(double a0, double c);
    void history_term(std::span<const double> a_n, double tau);
};

Simulation::Simulation(ModelConfig model, GridField u0, SimulationOptions options)
    : s_(std::make_unique<State>()) {
    model.validate();
    options.newton.validate();
    require(u0.spec() == model.grid, ErrorKind::SpecMismatch,
            "initial field does not live on the model grid");
    auto& s = *s_;
    s.model = std::move(model);
    s.opts = options;
    s.m = s.model.grid.size();
    const double h = s.model.grid.h();
    s.h2 = h * h;
    s.inv_h2 = 1.0 / s.h2;
    s.u = std::move(u0);
    s.u_prev = s.u;
    s.v = GridField(s.model.grid);
    for (auto* buf : {&s.lap_u, &s.lap_prev, &s.rhs, &s.res, &s.diag, &s.dx, &s.cg_r, &s.cg_z,
                      &s.cg_p, &s.cg_q, &s.forcing}) {
        buf->assign(s.m, 0.0);
    }
    SolveRecord r0;
    r0.E = energy_original(s.u, s.model.epsilon);
    r0.E_alpha = r0.E;
    r0.max_norm = norm_inf(s.u);
    s.records.push_back(r0);
}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

void Simulation::set_soe(std::shared_ptr<const SoeApprox> soe) {
    require(soe != nullptr, ErrorKind::Configuration, "null sum-of-exponentials approximation");
    require(std::abs(soe->alpha() - s_->model.alpha) <= 1e-15, ErrorKind::Configuration,
            "sum-of-exponentials order differs from the model order");
    require(s_->points.size() == 1, ErrorKind::Configuration,
            "the approximation must be attached before the first step");
    s_->soe = std::move(soe);
    s_->H.assign(s_->m * s_->soe->size(), 0.0);
}

const SolveRecord& Simulation::step(double tau) {
    require(std::isfinite(tau) && tau > 0.0, ErrorKind::InvalidParameter,
            "time step must be positive and finite");
    return s_->advance(s_->points.back() + tau);
}

const SolveRecord& Simulation::step_to(double t_next) { return s_->advance(t_next); }

void Simulation::run(const TimeMesh& mesh) {
    const auto pts = mesh.points();
    require(pts.size() >= s_->points.size(), ErrorKind::InvalidParameter,
            "mesh is shorter than the steps already taken");
    for (std::size_t k = 0; k < s_->points.size(); ++k) {
        require(pts[k] == s_->points[k], ErrorKind::InvalidParameter,
                "mesh does not extend the points already taken");
    }
    for (std::size_t k = s_->points.size(); k < pts.size(); ++k) {
        s_->advance(pts[k]);
    }
}

const ModelConfig& Simulation::model() const noexcept { return s_->model; }
const SimulationOptions& Simulation::options() const noexcept { return s_->opts; }
std::size_t Simulation::n() const noexcept { return s_->points.size() - 1; }
double Simulation::t() const noexcept { return s_->points.back(); }
std::span<const double> Simulation::points() const noexcept { return s_->points; }
TimeMesh Simulation::mesh() const { return TimeMesh(s_->points); }
const GridField& Simulation::u() const noexcept { return s_->u; }
const GridField& Simulation::u_previous() const noexcept { return s_->u_prev; }
const GridField& Simulation::v_last() const noexcept { return s_->v; }
std::span<const std::vector<double>> Simulation::v_history() const noexcept {
    return s_->v_hist;
}
std::span<const double> Simulation::v_square_sums() const noexcept { return s_->S; }
const std::vector<SolveRecord>& Simulation::records() const noexcept { return s_->records; }
const SolveRecord& Simulation::last() const noexcept { return s_->records.back(); }

double Simulation::restricted_step(double tau_proposed) const {
    const auto& md = s_->model;
    const double h = md.grid.h();
    const double prev = n() == 0 ? 0.0 : s_->points[n()] - s_->points[n() - 1];
    auto bound = [&](double tau) {
        const double r = prev > 0.0 ? tau / prev : 1.0;
        return max_bound_restriction(md.alpha, r, h, md.epsilon);
    };
    if (tau_proposed <= bound(tau_proposed)) {
        return tau_proposed;
    }
    // tau - bound(tau) is increasing in tau.
    double lo = 0.0;
    double hi = tau_proposed;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mid <= bound(mid) ? lo : hi) = mid;
    }
    return lo;
}

void Simulation::State::history_term(std::span<const double> a_n, double tau) {
    const std::size_t n = a_n.size();
    if (n == 1) {
        std::fill(rhs.begin(), rhs.end(), 0.0);
        return;
    }
    if (opts.mode == HistoryMode::Direct) {
        std::vector<double> coef(n - 1);
        for (std::size_t k = 1; k < n; ++k) {
            coef[k - 1] = a_n[n - k];
        }
        kernels::weighted_history_sum(coef, v_hist, rhs);
        return;
    }
    // Bring the accumulators from t_{n-2} to t_{n-1}, then contract with
    // the coefficients of the current step.
    const auto prev = soe_step_coefficients(*soe, pending_tau);
    auto now = soe_step_coefficients(*soe, tau);
    for (auto& c : now.history) {
        c = -c;
    }
    kernels::soe_update_contract(H, v.values(), prev.decay, prev.inject, now.history, rhs);
}

int Simulation::State::pcg(double a0, double c) {
    // J x = x + a0 d.x - c D x with d = dH/da, c = a0 eps^2 / 2.
    const auto& nw = opts.newton;
    const std::size_t M1 = model.grid.M1;
    const double centre = 4.0 * c * inv_h2;
    for_each_point(m, [&](std::size_t p) {
        dx[p] = 0.0;
        cg_r[p] = -res[p];
        cg_z[p] = cg_r[p] / (1.0 + a0 * diag[p] + centre);
        cg_p[p] = cg_z[p];
    });
    const double bnorm = std::sqrt(kernels::dot(cg_r, cg_r, M1));
    const double floor_inf = 0.05 * nw.tol_inf;
    double rz = kernels::dot(cg_r, cg_z, M1);
    int it = 0;
    for (; it < nw.linear_max_iters; ++it) {
        if (bnorm == 0.0) {
            break;
        }
        kernels::laplacian(cg_p, cg_q, M1, inv_h2);
        for_each_point(m, [&](std::size_t p) {
            cg_q[p] = cg_p[p] + a0 * diag[p] * cg_p[p] - c * cg_q[p];
        });
        const double pq = kernels::dot(cg_p, cg_q, M1);
        require(pq > 0.0, ErrorKind::NewtonDivergence,
                "Newton Jacobian is not positive definite (step too large?)");
        const double step = rz / pq;
        for_each_point(m, [&](std::size_t p) {
            dx[p] += step * cg_p[p];
            cg_r[p] -= step * cg_q[p];
            cg_z[p] = cg_r[p] / (1.0 + a0 * diag[p] + centre);
        });
        const double rr = kernels::dot(cg_r, cg_r, M1);
        if (std::sqrt(rr) <= nw.linear_tol * bnorm || kernels::max_abs(cg_r) <= floor_inf) {
            ++it;
            break;
        }
        const double rz_next = kernels::dot(cg_r, cg_z, M1);
        const double beta = rz_next / rz;
        rz = rz_next;
        for_each_point(m, [&](std::size_t p) { cg_p[p] = cg_z[p] + beta * cg_p[p]; });
    }
    return it;
}

int Simulation::State::newton(double a0, double c) {
    const auto& nw = opts.newton;
    const std::size_t M1 = model.grid.M1;
    auto uv = u.values();
    const auto uo = u_prev.values();
    for (int it = 0;; ++it) {
        kernels::laplacian(uv, lap_u, M1, inv_h2);
        for_each_point(m, [&](std::size_t p) {
            res[p] = uv[p] + a0 * bulk::bulk_H(uv[p], uo[p]) - c * (lap_u[p] + lap_prev[p]) -
                     rhs[p];
        });
        const double rmax = kernels::max_abs(res);
        require(std::isfinite(rmax), ErrorKind::NewtonDivergence,
                "non-finite Newton residual at t=" + std::to_string(points.back()));
        if (rmax <= nw.tol_inf) {
            return it;
        }
        if (it == nw.max_iters) {
            throw Error(ErrorKind::NewtonDivergence,
                        "Newton did not converge in " + std::to_string(nw.max_iters) +
                            " iterations at t=" + std::to_string(points.back()) +
                            " (residual " + std::to_string(rmax) + ")");
        }
        for_each_point(m, [&](std::size_t p) { diag[p] = bulk::bulk_H_partial_a(uv[p], uo[p]); });
        pcg(a0, c);
        for_each_point(m, [&](std::size_t p) { uv[p] += dx[p]; });
    }
}

const SolveRecord& Simulation::State::advance(double t_next) {
    const double t_now = points.back();
    require(std::isfinite(t_next) && t_next > t_now, ErrorKind::InvalidParameter,
            "time points must increase");
    const double tau = t_next - t_now;
    const double alpha = model.alpha;
    const double eps2 = model.epsilon * model.epsilon;
    const std::size_t M1 = model.grid.M1;
    if (opts.mode == HistoryMode::Fast) {
        require(soe != nullptr, ErrorKind::Configuration,
                "fast history mode needs a sum-of-exponentials approximation");
        require(tau >= soe->cutoff(), ErrorKind::Configuration,
                "step " + std::to_string(tau) + " is below the approximation cutoff " +
                    std::to_string(soe->cutoff()));
        require(t_next <= soe->horizon() * (1.0 + 1e-12), ErrorKind::Configuration,
                "time " + std::to_string(t_next) + " exceeds the approximation horizon");
    }

    points.push_back(t_next);
    const std::size_t n = points.size() - 1;
    const auto q_n = frac::q_row(points, alpha, n);
    const auto a_n = n == 1 ? q_n : frac::a_row_from_q(q_n, q_prev);
    const double a0 = a_n[0];

    history_term(a_n, tau);
    if (model.forcing) {
        model.forcing(t_now, t_next, model.grid, forcing);
    }
    u_prev.storage() = u.storage();
    const auto uo = u_prev.values();
    kernels::laplacian(uo, lap_prev, M1, inv_h2);
    const bool forced = static_cast<bool>(model.forcing);
    for_each_point(m, [&](std::size_t p) {
        rhs[p] = uo[p] + rhs[p] + (forced ? tau * forcing[p] : 0.0);
    });

    const double c = 0.5 * a0 * eps2;
    SolveRecord rec;
    rec.n = n;
    rec.t = t_next;
    rec.tau = tau;
    rec.newton_iters = newton(a0, c);

    // lap_u now holds D_h u^n.
    auto uv = u.values();
    auto vv = v.values();
    std::vector<double> F(m), dF(m), du(m), ls(m);
    for_each_point(m, [&](std::size_t p) {
        const double a = uv[p];
        const double b = uo[p];
        ls[p] = lap_u[p] + lap_prev[p];
        vv[p] = 0.5 * eps2 * ls[p] - bulk::bulk_H(a, b);
        F[p] = bulk::potential_F(a);
        dF[p] = bulk::potential_difference(a, b);
        du[p] = a - b;
    });
    const double Sn = h2 * kernels::dot(vv, vv, M1);
    S.push_back(Sn);

    rec.E = h2 * kernels::sum(F, M1) - 0.5 * eps2 * h2 * kernels::dot(uv, lap_u, M1);
    rec.max_norm = kernels::max_abs(uv);
    const double dE = h2 * kernels::sum(dF, M1) - 0.5 * eps2 * h2 * kernels::dot(du, ls, M1);
    if (opts.track_variational_energy) {
        rec.E_alpha = rec.E + variational_memory(q_n, S);
        if (!forced) {
            const double dMemory = 0.5 * frac::frac_integral(S, a_n);
            const double cell = frac::omega_increment(1.0 + alpha, t_now, tau);
            rec.dissipation = (dE + dMemory) / tau + cell / (2.0 * tau) * Sn;
        }
    } else {
        rec.E_alpha = rec.E;
    }

    if (opts.track_caputo_residual) {
        a_rows.push_back(a_n);
        std::vector<double> w(m);
        for_each_point(m, [&](std::size_t p) {
            w[p] = du[p] - (forced ? tau * forcing[p] : 0.0);
        });
        w_hist.push_back(std::move(w));
        const auto theta = frac::doc_row(a_rows, n);
        std::vector<double> coef(n);
        for (std::size_t j = 1; j <= n; ++j) {
            coef[j - 1] = theta[n - j];
        }
        std::vector<double> lhs(m);
        kernels::weighted_history_sum(coef, w_hist, lhs);
        for_each_point(m, [&](std::size_t p) { lhs[p] -= vv[p]; });
        rec.caputo_residual = kernels::max_abs(lhs) / theta[0];
    }

    const double ratio = n == 1 ? 1.0 : tau / (t_now - points[n - 2]);
    rec.restriction_ok =
        tau <= max_bound_restriction(alpha, ratio, model.grid.h(), model.epsilon);
    rec.solvability_warning = tau >= solvability_threshold(alpha);

    if (opts.mode == HistoryMode::Direct) {
        v_hist.push_back(v.storage());
    } else {
        pending_tau = tau;
    }
    q_prev = q_n;
    records.push_back(rec);
    return records.back();
}

std::size_t advance_adaptive(Simulation& sim, const AdaptiveController& ctrl, double T) {
    ctrl.validate();
    require(T > sim.t(), ErrorKind::InvalidParameter, "adaptive horizon lies in the past");
    std::size_t taken = 0;
    while (sim.t() < T) {
        const auto& recs = sim.records();
        double rate = 0.0;
        if (recs.size() >= 2) {
            const auto& a = recs[recs.size() - 1];
            const auto& b = recs[recs.size() - 2];
            rate = (a.E_alpha - b.E_alpha) / a.tau;
        }
        double tau = adaptive_next_step(ctrl, rate);
        if (ctrl.enforce_restriction) {
            tau = sim.restricted_step(tau);
        }
        const double t_next = sim.t() + tau >= T * (1.0 - 1e-12) ? T : sim.t() + tau;
        sim.step_to(t_next);
        ++taken;
    }
    return taken;
}

}  // namespace tfac
