#pragma once

// Double-well potential and its two-point Crank-Nicolson surrogate.

namespace tfac::bulk {

/// F(u) = (1 - u^2)^2 / 4
[[nodiscard]] constexpr double potential_F(double u) noexcept {
    const double w = 1.0 - u * u;
    return 0.25 * w * w;
}

/// f(u) = F'(u) = u^3 - u
[[nodiscard]] constexpr double force_f(double u) noexcept { return u * u * u - u; }

/// H(a, b) = a^3/3 + a b^2/2 + b^3/6 - (a + b)/2.
/// H(a, b)(a - b) = F(a) - F(b) + (a - b)^4 / 12 and H(a, a) = f(a).
[[nodiscard]] constexpr double bulk_H(double a, double b) noexcept {
    // One division keeps H(1, 1) and H(-1, -1) exactly zero.
    return (2.0 * a * a * a + 3.0 * a * b * b + b * b * b - 3.0 * (a + b)) / 6.0;
}

/// dH/da = a^2 + (b^2 - 1)/2
[[nodiscard]] constexpr double bulk_H_partial_a(double a, double b) noexcept {
    return a * a + 0.5 * (b * b - 1.0);
}

/// F(a) - F(b) written as a product, which keeps small increments accurate.
[[nodiscard]] constexpr double potential_difference(double a, double b) noexcept {
    return 0.25 * (b - a) * (b + a) * (2.0 - a * a - b * b);
}

}  // namespace tfac::bulk
