#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace tfac {

/// Strictly increasing time points 0 = t_0 < t_1 < ... < t_N.
///
/// Steps are stored as the exact floating-point differences of consecutive
/// points, and ratios as quotients of consecutive steps, so the derived
/// arrays are consistent with the points by construction. Index conventions
/// follow the scheme: step(k) = t_k - t_{k-1} for 1 <= k <= N, and
/// ratio(n) = step(n) / step(n-1) for n >= 2.
class TimeMesh {
public:
    TimeMesh() : points_{0.0} {}
    explicit TimeMesh(std::vector<double> points);

    [[nodiscard]] std::size_t num_steps() const noexcept { return points_.size() - 1; }
    [[nodiscard]] double t(std::size_t k) const { return points_.at(k); }
    [[nodiscard]] double step(std::size_t k) const { return steps_.at(k); }
    [[nodiscard]] double ratio(std::size_t n) const;
    [[nodiscard]] double final_time() const noexcept { return points_.back(); }
    [[nodiscard]] double max_step() const noexcept;
    [[nodiscard]] double min_step() const noexcept;

    [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
    /// steps()[0] is unused (0); steps()[k] = t_k - t_{k-1}.
    [[nodiscard]] std::span<const double> steps() const noexcept { return steps_; }

    /// Two-column CSV "index,t".
    void write_csv(std::ostream& os) const;

private:
    std::vector<double> points_;
    std::vector<double> steps_{0.0};
};

/// Graded mesh t_k = T0 (k/N0)^gamma, 0 <= k <= N0.
[[nodiscard]] TimeMesh build_graded(double T0, std::size_t N0, double gamma);

/// Graded on [0, T0], then uniform steps of size tau_tail up to T; only the
/// final step is shortened so the mesh lands on T exactly.
[[nodiscard]] TimeMesh build_graded_uniform(double T0, std::size_t N0, double gamma,
                                            double T, double tau_tail);

/// Graded on [0, T0] with N0 cells, then N_total - N0 random steps
/// proportional to uniform (0,1) draws of a CounterRng(seed), normalized to
/// fill (T0, T].
[[nodiscard]] TimeMesh build_graded_random(double T0, std::size_t N0, double gamma,
                                           double T, std::size_t N_total,
                                           std::uint64_t seed);

struct GradedSplit {
    double T0;
    std::size_t N0;
};

/// T0 = min{1/gamma, T}, N0 = ceil(N / (T + 1 - 1/gamma)).
[[nodiscard]] GradedSplit graded_random_split(double gamma, double T, std::size_t N_total);

/// Graded-plus-random mesh with the split derived from (gamma, T, N).
[[nodiscard]] TimeMesh build_graded_random(double gamma, double T, std::size_t N_total,
                                           std::uint64_t seed);

/// N steps proportional to uniform (0,1) draws, normalized to end at T.
[[nodiscard]] TimeMesh build_random(double T, std::size_t N, std::uint64_t seed);

/// Feed-forward step controller driven by the variational energy rate.
struct AdaptiveController {
    double kappa = 1.0e3;
    double tau_min = 1.0e-3;
    double tau_max = 1.0e-1;
    /// Also clip each step by the maximum-bound restriction.
    bool enforce_restriction = false;

    void validate() const;
};

/// max{tau_min, tau_max / sqrt(1 + kappa * rate^2)}.
[[nodiscard]] double adaptive_next_step(const AdaptiveController& ctrl, double energy_rate);

}  // namespace tfac
