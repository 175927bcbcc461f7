#include "tfac/grid.hpp"

#include "tfac/error.hpp"
#include "tfac/field_kernels.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace tfac {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

void require_same(const GridField& u, const GridField& w) {
    require(u.spec() == w.spec(), ErrorKind::SpecMismatch, "fields live on different grids");
}

}  // namespace

GridSpec::GridSpec(double length, std::size_t m1) : L(length), M1(m1) {
    require(m1 >= 2, ErrorKind::InvalidParameter, "grid needs M1 >= 2");
    require(std::isfinite(length) && length > 0.0, ErrorKind::InvalidParameter,
            "grid length must be positive");
}

GridField::GridField(const GridSpec& spec, double fill)
    : spec_(spec), values_(spec.size(), fill) {}

GridField::GridField(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
    require(values_.size() == spec_.size(), ErrorKind::SpecMismatch,
            "field values do not match the grid size");
}

double GridField::at(long i, long j) const noexcept {
    const long m = static_cast<long>(spec_.M1);
    const long ii = ((i % m) + m) % m;
    const long jj = ((j % m) + m) % m;
    return values_[static_cast<std::size_t>(ii * m + jj)];
}

GridField laplacian_apply(const GridField& u) {
    GridField out(u.spec());
    const double h = u.spec().h();
    kernels::laplacian(u.values(), out.values(), u.spec().M1, 1.0 / (h * h));
    return out;
}

double inner_h(const GridField& u, const GridField& w) {
    require_same(u, w);
    const double h = u.spec().h();
    return h * h * kernels::dot(u.values(), w.values(), u.spec().M1);
}

double norm_inf(const GridField& u) { return kernels::max_abs(u.values()); }

double norm_l2h(const GridField& u) { return std::sqrt(inner_h(u, u)); }

std::vector<double> laplacian_dense(const GridSpec& spec) {
    require(spec.M1 <= 16, ErrorKind::InvalidParameter, "dense Laplacian limited to M1 <= 16");
    const std::size_t m = spec.size();
    std::vector<double> D(m * m, 0.0);
    GridField e(spec);
    for (std::size_t c = 0; c < m; ++c) {
        e.storage()[c] = 1.0;
        const GridField col = laplacian_apply(e);
        for (std::size_t r = 0; r < m; ++r) {
            D[r * m + c] = col.storage()[r];
        }
        e.storage()[c] = 0.0;
    }
    return D;
}

StencilEntries laplacian_stencil(const GridSpec& spec) {
    // Read the stencil off the operator itself: D_h applied to a unit spike.
    GridField spike(spec);
    const std::size_t c = spec.M1 / 2;
    spike(c, c) = 1.0;
    const GridField d = laplacian_apply(spike);
    StencilEntries out{d(c, c), {}};
    const long ci = static_cast<long>(c);
    for (const auto& [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        out.neighbours.push_back(d.at(ci + di, ci + dj));
    }
    return out;
}

void write_field_csv(const GridField& u, const std::filesystem::path& path) {
    std::ofstream os(path);
    require(static_cast<bool>(os), ErrorKind::Io, "cannot open " + path.string());
    os.precision(17);
    os << "i,j,value\n";
    const std::size_t m = u.spec().M1;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            os << i << ',' << j << ',' << u(i, j) << '\n';
        }
    }
    require(static_cast<bool>(os), ErrorKind::Io, "write failed: " + path.string());
}

void write_field_binary(const GridField& u, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    require(static_cast<bool>(os), ErrorKind::Io, "cannot open " + path.string());
    const std::uint64_t m1 = u.spec().M1;
    const double L = u.spec().L;
    os.write(reinterpret_cast<const char*>(&m1), sizeof m1);
    os.write(reinterpret_cast<const char*>(&L), sizeof L);
    os.write(reinterpret_cast<const char*>(u.storage().data()),
             static_cast<std::streamsize>(u.size() * sizeof(double)));
    require(static_cast<bool>(os), ErrorKind::Io, "write failed: " + path.string());
}

GridField read_field_binary(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), ErrorKind::Io, "cannot open " + path.string());
    std::uint64_t m1 = 0;
    double L = 0.0;
    is.read(reinterpret_cast<char*>(&m1), sizeof m1);
    is.read(reinterpret_cast<char*>(&L), sizeof L);
    require(static_cast<bool>(is) && m1 >= 2 && m1 < (1u << 20), ErrorKind::Io,
            "bad snapshot header: " + path.string());
    GridField u(GridSpec(L, static_cast<std::size_t>(m1)));
    is.read(reinterpret_cast<char*>(u.storage().data()),
            static_cast<std::streamsize>(u.size() * sizeof(double)));
    require(static_cast<bool>(is), ErrorKind::Io, "truncated snapshot: " + path.string());
    return u;
}

}  // namespace tfac
