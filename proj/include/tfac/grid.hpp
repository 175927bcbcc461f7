#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace tfac {

/// Uniform periodic grid on [0, L)^2 with M1 points per dimension.
struct GridSpec {
    double L = 1.0;
    std::size_t M1 = 2;

    GridSpec() = default;
    GridSpec(double length, std::size_t m1);

    [[nodiscard]] double h() const noexcept { return L / static_cast<double>(M1); }
    [[nodiscard]] std::size_t size() const noexcept { return M1 * M1; }
    [[nodiscard]] double x(std::size_t i) const noexcept { return static_cast<double>(i) * h(); }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Real field on a GridSpec; row-major, value(i, j) = data[i * M1 + j],
/// i indexing x and j indexing y.
class GridField {
public:
    GridField() = default;
    explicit GridField(const GridSpec& spec, double fill = 0.0);
    GridField(const GridSpec& spec, std::vector<double> values);

    [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    /// Periodic access: any integer index is wrapped into [0, M1).
    [[nodiscard]] double at(long i, long j) const noexcept;
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * spec_.M1 + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept {
        return values_[i * spec_.M1 + j];
    }

    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::vector<double>& storage() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& storage() const noexcept { return values_; }

private:
    GridSpec spec_;
    std::vector<double> values_;
};

/// Five-point periodic Laplacian D_h u.
[[nodiscard]] GridField laplacian_apply(const GridField& u);

/// h^2 sum u_ij w_ij. Throws SpecMismatch on differing grids.
[[nodiscard]] double inner_h(const GridField& u, const GridField& w);
[[nodiscard]] double norm_inf(const GridField& u);
[[nodiscard]] double norm_l2h(const GridField& u);

/// Dense D_h (M x M, row-major) for small grids (M1 <= 16).
[[nodiscard]] std::vector<double> laplacian_dense(const GridSpec& spec);

/// Stencil of D_h as seen from one point: centre coefficient and the four
/// neighbour coefficients.
struct StencilEntries {
    double centre;
    std::vector<double> neighbours;
};
[[nodiscard]] StencilEntries laplacian_stencil(const GridSpec& spec);

/// "i,j,value" rows with a header line.
void write_field_csv(const GridField& u, const std::filesystem::path& path);

/// Little-endian: uint64 M1, float64 L, then M1^2 float64 values row-major.
void write_field_binary(const GridField& u, const std::filesystem::path& path);
[[nodiscard]] GridField read_field_binary(const std::filesystem::path& path);

}  // namespace tfac
