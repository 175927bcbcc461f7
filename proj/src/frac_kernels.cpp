#include "tfac/frac_kernels.hpp"

#include "tfac/error.hpp"

#include <cmath>
#include <string>

namespace tfac::frac {

double omega(double mu, double t) {
    require(mu > 0.0, ErrorKind::DomainError, "omega_mu requires mu > 0");
    if (t > 0.0) {
        return std::pow(t, mu - 1.0) / std::tgamma(mu);
    }
    require(t == 0.0 && mu >= 1.0, ErrorKind::DomainError,
            "omega_mu(t) with t <= 0 is undefined for mu < 1");
    return mu == 1.0 ? 1.0 : 0.0;
}

double omega_increment(double mu, double y, double d) {
    require(mu > 1.0, ErrorKind::DomainError, "omega_increment requires mu > 1");
    require(y >= 0.0 && d > 0.0, ErrorKind::DomainError,
            "omega_increment requires y >= 0 and d > 0");
    const double p = mu - 1.0;
    const double g = std::tgamma(mu);
    if (y == 0.0) {
        return std::pow(d, p) / g;
    }
    // y^p [(1 + d/y)^p - 1] keeps full relative precision when d << y.
    return std::pow(y, p) * std::expm1(p * std::log1p(d / y)) / g;
}

double cell_integral_omega(std::span<const double> points, double alpha, std::size_t n) {
    require(n >= 1 && n < points.size(), ErrorKind::InvalidParameter, "step index out of range");
    return omega_increment(1.0 + alpha, points[n - 1], points[n] - points[n - 1]);
}

std::vector<double> q_row(std::span<const double> points, double alpha, std::size_t n) {
    require(n >= 1 && n < points.size(), ErrorKind::InvalidParameter,
            "q_row: step index n=" + std::to_string(n) + " out of range");
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidParameter, "alpha must lie in (0,1)");
    std::vector<double> row(n);
    const double tn = points[n];
    for (std::size_t m = 0; m < n; ++m) {
        const std::size_t k = n - m;
        row[m] = omega_increment(1.0 + alpha, tn - points[k], points[k] - points[k - 1]);
    }
    return row;
}

std::vector<double> a_row_from_q(std::span<const double> q_n, std::span<const double> q_prev) {
    require(q_prev.size() + 1 == q_n.size(), ErrorKind::LengthMismatch,
            "a_row_from_q: q^(n-1) must be one shorter than q^(n)");
    std::vector<double> row(q_n.size());
    row[0] = q_n[0];
    for (std::size_t m = 1; m < q_n.size(); ++m) {
        row[m] = q_n[m] - q_prev[m - 1];
    }
    return row;
}

std::vector<double> a_row(std::span<const double> points, double alpha, std::size_t n) {
    const auto qn = q_row(points, alpha, n);
    if (n == 1) {
        return qn;
    }
    const auto qp = q_row(points, alpha, n - 1);
    return a_row_from_q(qn, qp);
}

double l1r_derivative(std::span<const double> v_mid, std::span<const double> a_row_n,
                      double tau_n) {
    require(v_mid.size() == a_row_n.size(), ErrorKind::LengthMismatch,
            "l1r_derivative: history length must equal n");
    const std::size_t n = v_mid.size();
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        acc += a_row_n[n - k] * v_mid[k - 1];
    }
    return acc / tau_n;
}

double frac_integral(std::span<const double> v_mid, std::span<const double> q_row_n) {
    require(v_mid.size() == q_row_n.size(), ErrorKind::LengthMismatch,
            "frac_integral: history length must equal n");
    const std::size_t n = v_mid.size();
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        acc += q_row_n[n - k] * v_mid[k - 1];
    }
    return acc;
}

std::vector<double> doc_row(std::span<const std::vector<double>> a_rows, std::size_t n) {
    require(n >= 1 && a_rows.size() >= n, ErrorKind::MissingHistory,
            "doc_row: a-rows 1..n are required");
    std::vector<double> theta(n);
    theta[0] = 1.0 / a_rows[n - 1][0];
    for (std::size_t k = n - 1; k >= 1; --k) {
        double acc = 0.0;
        for (std::size_t j = k + 1; j <= n; ++j) {
            acc += theta[n - j] * a_rows[j - 1][j - k];
        }
        theta[n - k] = -acc / a_rows[k - 1][0];
    }
    return theta;
}

std::vector<double> dcc_row(std::span<const std::vector<double>> a_rows, std::size_t n) {
    require(n >= 1 && a_rows.size() >= n, ErrorKind::MissingHistory,
            "dcc_row: a-rows 1..n are required");
    std::vector<double> p(n);
    p[0] = 1.0 / a_rows[n - 1][0];
    for (std::size_t k = n - 1; k >= 1; --k) {
        double acc = 0.0;
        for (std::size_t j = k + 1; j <= n; ++j) {
            acc += p[n - j] * a_rows[j - 1][j - k];
        }
        p[n - k] = (1.0 - acc) / a_rows[k - 1][0];
    }
    return p;
}

KernelTable::KernelTable(const TimeMesh& mesh, double alpha, Options options)
    : mesh_(mesh), alpha_(alpha), n_(mesh.num_steps()) {
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidParameter, "alpha must lie in (0,1)");
    const auto pts = mesh_.points();
    q_.reserve(n_);
    a_.reserve(n_);
    for (std::size_t n = 1; n <= n_; ++n) {
        q_.push_back(q_row(pts, alpha, n));
        a_.push_back(n == 1 ? q_.back() : a_row_from_q(q_[n - 1], q_[n - 2]));
    }
    if (options.with_doc) {
        theta_.reserve(n_);
        for (std::size_t n = 1; n <= n_; ++n) {
            theta_.push_back(doc_row(a_, n));
        }
    }
    if (options.with_dcc) {
        p_.reserve(n_);
        for (std::size_t n = 1; n <= n_; ++n) {
            p_.push_back(dcc_row(a_, n));
        }
    }
}

std::span<const double> KernelTable::theta(std::size_t n) const {
    require(has_doc(), ErrorKind::MissingHistory, "kernel table was built without DOC rows");
    return theta_.at(n - 1);
}

std::span<const double> KernelTable::p(std::size_t n) const {
    require(has_dcc(), ErrorKind::MissingHistory, "kernel table was built without DCC rows");
    return p_.at(n - 1);
}

double KernelTable::orthogonality_residual(std::size_t n, std::size_t k) const {
    const auto th = theta(n);
    double acc = 0.0;
    for (std::size_t j = k; j <= n; ++j) {
        acc += th[n - j] * a_[j - 1][j - k];
    }
    return acc - (n == k ? 1.0 : 0.0);
}

double KernelTable::mutual_orthogonality_residual(std::size_t n, std::size_t k) const {
    require(has_doc(), ErrorKind::MissingHistory, "kernel table was built without DOC rows");
    const auto& an = a_[n - 1];
    double acc = 0.0;
    for (std::size_t j = k; j <= n; ++j) {
        acc += an[n - j] * theta_[j - 1][j - k];
    }
    return acc - (n == k ? 1.0 : 0.0);
}

double KernelTable::dco_residual(std::size_t n, std::size_t k) const {
    require(has_doc(), ErrorKind::MissingHistory, "kernel table was built without DOC rows");
    const auto& qn = q_[n - 1];
    double acc = 0.0;
    for (std::size_t j = k; j <= n; ++j) {
        acc += qn[n - j] * theta_[j - 1][j - k];
    }
    return acc - 1.0;
}

double KernelTable::dcc_residual(std::size_t n, std::size_t k) const {
    const auto pn = p(n);
    double acc = 0.0;
    for (std::size_t j = k; j <= n; ++j) {
        acc += pn[n - j] * a_[j - 1][j - k];
    }
    return acc - 1.0;
}

}  // namespace tfac::frac
