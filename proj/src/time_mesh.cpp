#include "tfac/time_mesh.hpp"

#include "tfac/error.hpp"
#include "tfac/random.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace tfac {

TimeMesh::TimeMesh(std::vector<double> points) : points_(std::move(points)) {
    require(!points_.empty() && points_.front() == 0.0, ErrorKind::InvalidParameter,
            "time mesh must start at t_0 = 0");
    steps_.assign(points_.size(), 0.0);
    for (std::size_t k = 1; k < points_.size(); ++k) {
        require(std::isfinite(points_[k]) && points_[k] > points_[k - 1],
                ErrorKind::InvalidParameter,
                "time mesh points must be strictly increasing (index " + std::to_string(k) + ")");
        steps_[k] = points_[k] - points_[k - 1];
    }
}

double TimeMesh::ratio(std::size_t n) const {
    require(n >= 2 && n <= num_steps(), ErrorKind::InvalidParameter,
            "step ratio r_n is defined for 2 <= n <= N");
    return steps_[n] / steps_[n - 1];
}

double TimeMesh::max_step() const noexcept {
    return num_steps() == 0 ? 0.0 : *std::max_element(steps_.begin() + 1, steps_.end());
}

double TimeMesh::min_step() const noexcept {
    return num_steps() == 0 ? 0.0 : *std::min_element(steps_.begin() + 1, steps_.end());
}

void TimeMesh::write_csv(std::ostream& os) const {
    os << "index,t\n";
    const auto old = os.precision(17);
    for (std::size_t k = 0; k < points_.size(); ++k) {
        os << k << ',' << points_[k] << '\n';
    }
    os.precision(old);
}

namespace {

std::vector<double> graded_points(double T0, std::size_t N0, double gamma) {
    require(T0 > 0.0, ErrorKind::InvalidParameter, "graded mesh needs T0 > 0");
    require(N0 >= 1, ErrorKind::InvalidParameter, "graded mesh needs N0 >= 1");
    require(gamma >= 1.0, ErrorKind::InvalidParameter, "graded mesh needs gamma >= 1");
    std::vector<double> pts(N0 + 1);
    pts[0] = 0.0;
    for (std::size_t k = 1; k < N0; ++k) {
        pts[k] = T0 * std::pow(static_cast<double>(k) / static_cast<double>(N0), gamma);
    }
    pts[N0] = T0;
    return pts;
}

}  // namespace

TimeMesh build_graded(double T0, std::size_t N0, double gamma) {
    return TimeMesh(graded_points(T0, N0, gamma));
}

TimeMesh build_graded_uniform(double T0, std::size_t N0, double gamma, double T,
                              double tau_tail) {
    require(tau_tail > 0.0, ErrorKind::InvalidParameter, "tail step must be positive");
    require(T > T0, ErrorKind::InvalidParameter, "horizon T must exceed T0");
    auto pts = graded_points(T0, N0, gamma);

    // Number of tail cells: ceil((T - T0)/tau), treating a ratio within a few
    // ulps of an integer as that integer.
    const double cells = (T - T0) / tau_tail;
    const double nearest = std::round(cells);
    std::size_t m = (std::abs(cells - nearest) <= 1e-9 * std::max(1.0, cells))
                        ? static_cast<std::size_t>(nearest)
                        : static_cast<std::size_t>(std::ceil(cells));
    m = std::max<std::size_t>(m, 1);
    pts.reserve(pts.size() + m);
    for (std::size_t k = 1; k < m; ++k) {
        pts.push_back(T0 + static_cast<double>(k) * tau_tail);
    }
    pts.push_back(T);
    return TimeMesh(std::move(pts));
}

GradedSplit graded_random_split(double gamma, double T, std::size_t N_total) {
    require(gamma >= 1.0 && T > 0.0, ErrorKind::InvalidParameter,
            "graded split needs gamma >= 1 and T > 0");
    const double T0 = std::min(1.0 / gamma, T);
    const double denom = T + 1.0 - 1.0 / gamma;
    const auto N0 = static_cast<std::size_t>(std::ceil(static_cast<double>(N_total) / denom));
    return {T0, N0};
}

TimeMesh build_graded_random(double T0, std::size_t N0, double gamma, double T,
                             std::size_t N_total, std::uint64_t seed) {
    require(N_total > N0, ErrorKind::InvalidParameter,
            "graded-random mesh needs N_total > N0 (got " + std::to_string(N_total) + " <= " +
                std::to_string(N0) + ")");
    require(T > T0, ErrorKind::InvalidParameter, "horizon T must exceed T0");
    auto pts = graded_points(T0, N0, gamma);

    const std::size_t m = N_total - N0;
    const CounterRng rng(seed);
    std::vector<double> eps(m);
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        eps[k] = rng.uniform(k);
        total += eps[k];
    }
    const double span = T - T0;
    double acc = 0.0;
    pts.reserve(N_total + 1);
    for (std::size_t k = 0; k + 1 < m; ++k) {
        acc += eps[k];
        pts.push_back(T0 + span * (acc / total));
    }
    pts.push_back(T);
    return TimeMesh(std::move(pts));
}

TimeMesh build_graded_random(double gamma, double T, std::size_t N_total, std::uint64_t seed) {
    const auto [T0, N0] = graded_random_split(gamma, T, N_total);
    return build_graded_random(T0, N0, gamma, T, N_total, seed);
}

TimeMesh build_random(double T, std::size_t N, std::uint64_t seed) {
    require(T > 0.0 && N >= 1, ErrorKind::InvalidParameter, "random mesh needs T > 0 and N >= 1");
    const CounterRng rng(seed, 2);
    std::vector<double> cum(N + 1, 0.0);
    for (std::size_t k = 1; k <= N; ++k) {
        cum[k] = cum[k - 1] + rng.uniform(k - 1);
    }
    std::vector<double> pts(N + 1, 0.0);
    for (std::size_t k = 1; k < N; ++k) {
        pts[k] = T * (cum[k] / cum[N]);
    }
    pts[N] = T;
    return TimeMesh(std::move(pts));
}

void AdaptiveController::validate() const {
    require(tau_min > 0.0 && tau_min <= tau_max, ErrorKind::InvalidParameter,
            "adaptive controller needs 0 < tau_min <= tau_max");
    require(kappa >= 0.0, ErrorKind::InvalidParameter, "adaptive controller needs kappa >= 0");
}

double adaptive_next_step(const AdaptiveController& ctrl, double energy_rate) {
    const double scaled = ctrl.tau_max / std::sqrt(1.0 + ctrl.kappa * energy_rate * energy_rate);
    return std::clamp(scaled, ctrl.tau_min, ctrl.tau_max);
}

}  // namespace tfac
