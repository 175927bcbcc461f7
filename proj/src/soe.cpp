#include "tfac/soe.hpp"

#include "gauss_rules.hpp"
#include "tfac/error.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace tfac {

using detail::quad;

struct SoeApprox::Coefficients {
    std::vector<quad> nodes;
    std::vector<quad> weights;
};

namespace {

constexpr int kMaxDepth = 6;
constexpr std::size_t kMaxBandOrder = 96;
// exp(-x) below this argument is kept; beyond it a term is negligible
// against any weight the construction can produce.
constexpr double kExpCut = 120.0;

quad omega_q(quad alpha, quad t) { return powq(t, alpha - 1) / tgammaq(alpha); }

quad soe_sum(std::span<const quad> nodes, std::span<const quad> weights, quad t) {
    quad acc = 0;
    for (std::size_t l = 0; l < nodes.size(); ++l) {
        const quad x = nodes[l] * t;
        if (x < kExpCut) {
            acc += weights[l] * expq(-x);
        }
    }
    return acc;
}

std::vector<quad> log_grid(double lo, double hi, std::size_t count) {
    std::vector<quad> ts(count);
    const quad llo = logq(lo);
    const quad lhi = logq(hi);
    for (std::size_t i = 0; i < count; ++i) {
        const quad f = count == 1 ? 0 : static_cast<quad>(i) / static_cast<quad>(count - 1);
        ts[i] = expq(llo + (lhi - llo) * f);
    }
    ts.front() = lo;
    ts.back() = hi;
    return ts;
}

struct Band {
    quad lo;
    quad hi;
    bool jacobi;  // [0, hi] with the s^(-alpha) weight absorbed
};

// Nodes/weights of one band at a given order, including sin(pi alpha)/pi.
void band_rule(const Band& band, std::size_t order, quad alpha, quad c,
               std::vector<quad>& nodes, std::vector<quad>& weights) {
    nodes.clear();
    weights.clear();
    if (band.jacobi) {
        const auto rule = detail::gauss_jacobi_b(order, -static_cast<double>(alpha));
        const quad half = band.hi / 2;
        const quad scale = c * powq(half, 1 - alpha);
        for (std::size_t i = 0; i < order; ++i) {
            nodes.push_back(half * (1 + rule.nodes[i]));
            weights.push_back(scale * rule.weights[i]);
        }
    } else {
        const auto rule = detail::gauss_legendre(order);
        const quad half = (band.hi - band.lo) / 2;
        for (std::size_t i = 0; i < order; ++i) {
            const quad s = band.lo + half * (1 + rule.nodes[i]);
            nodes.push_back(s);
            weights.push_back(c * half * rule.weights[i] * powq(s, -alpha));
        }
    }
}

// Smallest order whose band integral agrees with order+4 to `target` on ts.
std::size_t choose_order(const Band& band, quad alpha, quad c, std::span<const quad> ts,
                         quad target) {
    std::vector<quad> n1, w1, n2, w2;
    for (std::size_t order = 2; order + 4 <= kMaxBandOrder; order += 2) {
        band_rule(band, order, alpha, c, n1, w1);
        band_rule(band, order + 4, alpha, c, n2, w2);
        quad worst = 0;
        for (const quad t : ts) {
            worst = fmaxq(worst, fabsq(soe_sum(n1, w1, t) - soe_sum(n2, w2, t)));
            if (worst > target) {
                break;
            }
        }
        if (worst <= target) {
            return order;
        }
    }
    return kMaxBandOrder;
}

}  // namespace

SoeApprox SoeApprox::build(double alpha, double eps, double dt, double T) {
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidParameter, "SOE needs 0 < alpha < 1");
    require(dt > 0.0 && dt < T, ErrorKind::InvalidParameter, "SOE needs 0 < dt < T");
    require(eps > 0.0 && eps < 1.0, ErrorKind::InvalidParameter, "SOE needs 0 < eps < 1");

    const quad qa = alpha;
    const quad c = sinq(M_PIq * qa) / M_PIq;
    const quad qdt = dt;
    const quad qT = T;

    // Truncation frequency: c * S^(-alpha) exp(-dt S) / dt bounds the tail.
    const quad s0 = 1 / qT;
    const quad tail_target = static_cast<quad>(eps) / 50;
    quad s_cut = s0;
    while (c * powq(s_cut, -qa) * expq(-qdt * s_cut) / qdt > tail_target) {
        s_cut *= 2;
    }

    std::vector<Band> bands;
    bands.push_back({0, s0, true});
    for (quad lo = s0; lo < s_cut; lo *= 2) {
        bands.push_back({lo, 2 * lo, false});
    }

    const auto probe = log_grid(dt, T, 240);
    const auto cert = log_grid(dt, T, kCertificationPoints);

    for (int depth = 0; depth <= kMaxDepth; ++depth) {
        // Only the few bands with s ~ 1/t matter at a given t, so each band
        // gets a fixed share; certification below is the actual gate.
        const quad band_target = static_cast<quad>(eps) / (8 * powq(4, depth));
        auto coeffs = std::make_shared<Coefficients>();
        std::vector<quad> bn, bw;
        for (const auto& band : bands) {
            const auto order = choose_order(band, qa, c, probe, band_target);
            band_rule(band, order, qa, c, bn, bw);
            coeffs->nodes.insert(coeffs->nodes.end(), bn.begin(), bn.end());
            coeffs->weights.insert(coeffs->weights.end(), bw.begin(), bw.end());
        }

        // Restore int_0^dt omega with one node far above the last band.
        quad integral = 0;
        for (std::size_t l = 0; l < coeffs->nodes.size(); ++l) {
            integral += coeffs->weights[l] * (-expm1q(-coeffs->nodes[l] * qdt)) / coeffs->nodes[l];
        }
        const quad deficit = powq(qdt, qa) / tgammaq(1 + qa) - integral;
        if (deficit > 0) {
            const quad s_star = fmaxq(2 * s_cut, 60 / qdt);
            coeffs->nodes.push_back(s_star);
            coeffs->weights.push_back(deficit * s_star / (-expm1q(-s_star * qdt)));
        }

        quad worst = 0;
        for (const quad t : cert) {
            worst = fmaxq(worst, fabsq(omega_q(qa, t) - soe_sum(coeffs->nodes, coeffs->weights, t)));
        }
        if (worst <= static_cast<quad>(eps)) {
            SoeApprox out;
            out.alpha_ = alpha;
            out.eps_ = eps;
            out.dt_ = dt;
            out.T_ = T;
            out.certified_error_ = static_cast<double>(worst);
            out.depth_ = depth;
            out.nodes_.reserve(coeffs->nodes.size());
            out.weights_.reserve(coeffs->nodes.size());
            for (std::size_t l = 0; l < coeffs->nodes.size(); ++l) {
                out.nodes_.push_back(static_cast<double>(coeffs->nodes[l]));
                out.weights_.push_back(static_cast<double>(coeffs->weights[l]));
            }
            out.exact_ = std::move(coeffs);
            return out;
        }
    }
    throw Error(ErrorKind::ConstructionFailure,
                "SOE certification failed after " + std::to_string(kMaxDepth) +
                    " refinement levels");
}

long double SoeApprox::eval(double t) const {
    return static_cast<long double>(soe_sum(exact_->nodes, exact_->weights, t));
}

double SoeApprox::error_at(double t) const {
    return static_cast<double>(omega_q(alpha_, t) - soe_sum(exact_->nodes, exact_->weights, t));
}

std::vector<SoeApprox::Sample> SoeApprox::sample_grid(std::size_t count) const {
    require(count >= 2, ErrorKind::InvalidParameter, "sample grid needs at least 2 points");
    const auto ts = log_grid(dt_, T_, count);
    std::vector<Sample> out;
    out.reserve(count);
    const quad qa = alpha_;
    for (const quad t : ts) {
        const quad w = omega_q(qa, t);
        const quad s = soe_sum(exact_->nodes, exact_->weights, t);
        out.push_back({static_cast<double>(t), static_cast<double>(w), static_cast<double>(s),
                       static_cast<double>(w - s)});
    }
    return out;
}

void history_update(std::span<double> H, double v_mid, double tau, const SoeApprox& soe) {
    const auto s = soe.nodes();
    require(H.size() == s.size(), ErrorKind::LengthMismatch,
            "history_update: one accumulator per SOE node is required");
    for (std::size_t l = 0; l < s.size(); ++l) {
        const double x = s[l] * tau;
        H[l] = std::exp(-x) * H[l] + v_mid * (-std::expm1(-x)) / s[l];
    }
}

double fast_l1r_derivative(double a0_over_tau, double v_now, std::span<const double> H,
                           const SoeApprox& soe, double tau) {
    const auto s = soe.nodes();
    const auto w = soe.weights();
    require(H.size() == s.size(), ErrorKind::LengthMismatch,
            "fast_l1r_derivative: one accumulator per SOE node is required");
    double hist = 0.0;
    for (std::size_t l = 0; l < s.size(); ++l) {
        hist += w[l] * (-std::expm1(-s[l] * tau)) * H[l];
    }
    return a0_over_tau * v_now - hist / tau;
}

SoeStepCoefficients soe_step_coefficients(const SoeApprox& soe, double tau) {
    const auto s = soe.nodes();
    const auto w = soe.weights();
    SoeStepCoefficients c;
    c.decay.resize(s.size());
    c.inject.resize(s.size());
    c.history.resize(s.size());
    for (std::size_t l = 0; l < s.size(); ++l) {
        const double x = s[l] * tau;
        const double one_minus = -std::expm1(-x);
        c.decay[l] = std::exp(-x);
        c.inject[l] = one_minus / s[l];
        c.history[l] = w[l] * one_minus;
    }
    return c;
}

}  // namespace tfac
