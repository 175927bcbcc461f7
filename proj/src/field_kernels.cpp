#include "tfac/field_kernels.hpp"

#include "tfac/error.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tfac::kernels {

namespace {

// Below this many points the fork/join overhead dominates.
constexpr std::size_t kParallelMin = 4096;
constexpr std::size_t kBlock = 512;

struct Neumaier {
    double s = 0.0;
    double c = 0.0;
    void add(double x) noexcept {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    [[nodiscard]] double value() const noexcept { return s + c; }
};

double combine_rows(const std::vector<double>& rows) {
    Neumaier acc;
    for (double r : rows) {
        acc.add(r);
    }
    return acc.value();
}

void check_square(std::size_t size, std::size_t m1) {
    require(size == m1 * m1, ErrorKind::SpecMismatch, "field size does not match M1 x M1");
}

inline void laplacian_row(const double* u, double* out, std::size_t i, std::size_t m1,
                          double inv_h2) {
    const std::size_t up = (i + 1 == m1 ? 0 : i + 1) * m1;
    const std::size_t dn = (i == 0 ? m1 - 1 : i - 1) * m1;
    const std::size_t row = i * m1;
    out[row] = (u[up] + u[dn] + u[row + 1] + u[row + m1 - 1] - 4.0 * u[row]) * inv_h2;
    for (std::size_t j = 1; j + 1 < m1; ++j) {
        out[row + j] = (u[up + j] + u[dn + j] + u[row + j + 1] + u[row + j - 1] -
                        4.0 * u[row + j]) *
                       inv_h2;
    }
    const std::size_t last = row + m1 - 1;
    out[last] = (u[up + m1 - 1] + u[dn + m1 - 1] + u[row] + u[last - 1] - 4.0 * u[last]) * inv_h2;
}

inline void history_block(std::span<const double> coef,
                          std::span<const std::vector<double>> history, double* out,
                          std::size_t begin, std::size_t end) {
    std::fill(out + begin, out + end, 0.0);
    for (std::size_t k = 0; k < coef.size(); ++k) {
        const double c = coef[k];
        const double* h = history[k].data();
        for (std::size_t p = begin; p < end; ++p) {
            out[p] += c * h[p];
        }
    }
}

inline void soe_point(double* h, double vp, const double* decay, const double* inject,
                      std::size_t nq) {
    for (std::size_t l = 0; l < nq; ++l) {
        h[l] = decay[l] * h[l] + inject[l] * vp;
    }
}

inline double soe_point_contract(const double* h, const double* coef, std::size_t nq) {
    double acc = 0.0;
    for (std::size_t l = 0; l < nq; ++l) {
        acc += coef[l] * h[l];
    }
    return acc;
}

inline double soe_point_fused(double* h, double vp, const double* decay, const double* inject,
                              const double* coef, std::size_t nq) {
    double acc = 0.0;
    for (std::size_t l = 0; l < nq; ++l) {
        const double next = decay[l] * h[l] + inject[l] * vp;
        h[l] = next;
        acc += coef[l] * next;
    }
    return acc;
}

std::size_t modes_of(std::size_t H_size, std::size_t points) {
    require(points > 0 && H_size % points == 0, ErrorKind::LengthMismatch,
            "SOE accumulator buffer must hold nq values per point");
    return H_size / points;
}

}  // namespace

void set_num_threads(int n) {
#ifdef _OPENMP
    if (n > 0) {
        omp_set_num_threads(n);
    }
#else
    (void)n;
#endif
}

int num_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

bool parallel_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

void laplacian(std::span<const double> u, std::span<double> out, std::size_t m1, double inv_h2) {
    check_square(u.size(), m1);
    check_square(out.size(), m1);
    const double* src = u.data();
    double* dst = out.data();
#pragma omp parallel for schedule(static) if (u.size() >= kParallelMin)
    for (std::size_t i = 0; i < m1; ++i) {
        laplacian_row(src, dst, i, m1, inv_h2);
    }
}

double dot(std::span<const double> a, std::span<const double> b, std::size_t m1) {
    check_square(a.size(), m1);
    check_square(b.size(), m1);
    std::vector<double> rows(m1);
#pragma omp parallel for schedule(static) if (a.size() >= kParallelMin)
    for (std::size_t i = 0; i < m1; ++i) {
        Neumaier acc;
        for (std::size_t j = 0; j < m1; ++j) {
            acc.add(a[i * m1 + j] * b[i * m1 + j]);
        }
        rows[i] = acc.value();
    }
    return combine_rows(rows);
}

double sum(std::span<const double> a, std::size_t m1) {
    check_square(a.size(), m1);
    std::vector<double> rows(m1);
#pragma omp parallel for schedule(static) if (a.size() >= kParallelMin)
    for (std::size_t i = 0; i < m1; ++i) {
        Neumaier acc;
        for (std::size_t j = 0; j < m1; ++j) {
            acc.add(a[i * m1 + j]);
        }
        rows[i] = acc.value();
    }
    return combine_rows(rows);
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static) if (a.size() >= kParallelMin)
    for (std::size_t p = 0; p < a.size(); ++p) {
        m = std::max(m, std::abs(a[p]));
    }
    return m;
}

void weighted_history_sum(std::span<const double> coef,
                          std::span<const std::vector<double>> history, std::span<double> out) {
    require(coef.size() == history.size(), ErrorKind::LengthMismatch,
            "weighted_history_sum: one coefficient per history field");
    const std::size_t n = out.size();
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    double* dst = out.data();
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (std::size_t b = 0; b < blocks; ++b) {
        history_block(coef, history, dst, b * kBlock, std::min(n, (b + 1) * kBlock));
    }
}

void soe_update(std::span<double> H, std::span<const double> v, std::span<const double> decay,
                std::span<const double> inject) {
    const std::size_t nq = modes_of(H.size(), v.size());
    require(decay.size() == nq && inject.size() == nq, ErrorKind::LengthMismatch,
            "soe_update: coefficient length must equal nq");
    double* h = H.data();
#pragma omp parallel for schedule(static) if (v.size() >= kParallelMin / 8)
    for (std::size_t p = 0; p < v.size(); ++p) {
        soe_point(h + p * nq, v[p], decay.data(), inject.data(), nq);
    }
}

void soe_contract(std::span<const double> H, std::span<const double> coef, std::span<double> out) {
    const std::size_t nq = modes_of(H.size(), out.size());
    require(coef.size() == nq, ErrorKind::LengthMismatch, "soe_contract: coefficient length");
    const double* h = H.data();
#pragma omp parallel for schedule(static) if (out.size() >= kParallelMin / 8)
    for (std::size_t p = 0; p < out.size(); ++p) {
        out[p] = soe_point_contract(h + p * nq, coef.data(), nq);
    }
}

void soe_update_contract(std::span<double> H, std::span<const double> v,
                         std::span<const double> decay, std::span<const double> inject,
                         std::span<const double> coef, std::span<double> out) {
    const std::size_t nq = modes_of(H.size(), v.size());
    require(decay.size() == nq && inject.size() == nq && coef.size() == nq &&
                out.size() == v.size(),
            ErrorKind::LengthMismatch, "soe_update_contract: inconsistent lengths");
    double* h = H.data();
#pragma omp parallel for schedule(static) if (v.size() >= kParallelMin / 8)
    for (std::size_t p = 0; p < v.size(); ++p) {
        out[p] = soe_point_fused(h + p * nq, v[p], decay.data(), inject.data(), coef.data(), nq);
    }
}

namespace serial {

void laplacian(std::span<const double> u, std::span<double> out, std::size_t m1, double inv_h2) {
    check_square(u.size(), m1);
    check_square(out.size(), m1);
    for (std::size_t i = 0; i < m1; ++i) {
        laplacian_row(u.data(), out.data(), i, m1, inv_h2);
    }
}

double dot(std::span<const double> a, std::span<const double> b, std::size_t m1) {
    check_square(a.size(), m1);
    check_square(b.size(), m1);
    std::vector<double> rows(m1);
    for (std::size_t i = 0; i < m1; ++i) {
        Neumaier acc;
        for (std::size_t j = 0; j < m1; ++j) {
            acc.add(a[i * m1 + j] * b[i * m1 + j]);
        }
        rows[i] = acc.value();
    }
    return combine_rows(rows);
}

double sum(std::span<const double> a, std::size_t m1) {
    check_square(a.size(), m1);
    std::vector<double> rows(m1);
    for (std::size_t i = 0; i < m1; ++i) {
        Neumaier acc;
        for (std::size_t j = 0; j < m1; ++j) {
            acc.add(a[i * m1 + j]);
        }
        rows[i] = acc.value();
    }
    return combine_rows(rows);
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double x : a) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

void weighted_history_sum(std::span<const double> coef,
                          std::span<const std::vector<double>> history, std::span<double> out) {
    require(coef.size() == history.size(), ErrorKind::LengthMismatch,
            "weighted_history_sum: one coefficient per history field");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < coef.size(); ++k) {
        for (std::size_t p = 0; p < out.size(); ++p) {
            out[p] += coef[k] * history[k][p];
        }
    }
}

void soe_update(std::span<double> H, std::span<const double> v, std::span<const double> decay,
                std::span<const double> inject) {
    const std::size_t nq = modes_of(H.size(), v.size());
    for (std::size_t p = 0; p < v.size(); ++p) {
        for (std::size_t l = 0; l < nq; ++l) {
            H[p * nq + l] = decay[l] * H[p * nq + l] + inject[l] * v[p];
        }
    }
}

void soe_contract(std::span<const double> H, std::span<const double> coef, std::span<double> out) {
    const std::size_t nq = modes_of(H.size(), out.size());
    for (std::size_t p = 0; p < out.size(); ++p) {
        double acc = 0.0;
        for (std::size_t l = 0; l < nq; ++l) {
            acc += coef[l] * H[p * nq + l];
        }
        out[p] = acc;
    }
}

void soe_update_contract(std::span<double> H, std::span<const double> v,
                         std::span<const double> decay, std::span<const double> inject,
                         std::span<const double> coef, std::span<double> out) {
    soe_update(H, v, decay, inject);
    soe_contract(H, coef, out);
}

}  // namespace serial

}  // namespace tfac::kernels
