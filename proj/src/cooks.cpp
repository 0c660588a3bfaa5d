#include "him/cooks.hpp"

#include <cmath>
#include <string>

namespace him {

namespace {

// Dense Householder QR of an m x c matrix (column-major), c <= m.
// After factor(), a holds R in its upper triangle and the reflector vectors
// below the diagonal; tau holds the reflector scales.
struct HouseholderQr {
    std::size_t m = 0;
    std::size_t c = 0;
    std::vector<double> a;    // column-major m x c
    std::vector<double> tau;  // length c

    double& at(std::size_t i, std::size_t j) { return a[j * m + i]; }
    double at(std::size_t i, std::size_t j) const { return a[j * m + i]; }

    // Returns false if a diagonal of R collapses (rank-deficient design).
    bool factor() {
        tau.assign(c, 0.0);
        double max_diag = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            double norm2 = 0.0;
            for (std::size_t i = j; i < m; ++i) {
                norm2 += at(i, j) * at(i, j);
            }
            const double norm = std::sqrt(norm2);
            const double pivot = at(j, j);
            const double alpha = pivot >= 0.0 ? -norm : norm;
            if (norm == 0.0) {
                return false;
            }
            // v = x - alpha e1, normalized so v[j] = 1.
            const double v0 = pivot - alpha;
            if (v0 == 0.0) {
                // Column already aligned with e1; identity reflector.
                tau[j] = 0.0;
            } else {
                tau[j] = -v0 / alpha;
                const double inv_v0 = 1.0 / v0;
                for (std::size_t i = j + 1; i < m; ++i) {
                    at(i, j) *= inv_v0;
                }
            }
            at(j, j) = alpha;
            max_diag = std::max(max_diag, std::abs(alpha));
            if (std::abs(alpha) <= 1e-12 * std::max(1.0, max_diag)) {
                return false;
            }
            // Apply the reflector to the remaining columns.
            for (std::size_t jj = j + 1; jj < c; ++jj) {
                double dot = at(j, jj);
                for (std::size_t i = j + 1; i < m; ++i) {
                    dot += at(i, j) * at(i, jj);
                }
                dot *= tau[j];
                at(j, jj) -= dot;
                for (std::size_t i = j + 1; i < m; ++i) {
                    at(i, jj) -= dot * at(i, j);
                }
            }
        }
        return true;
    }

    // v <- Q' v (apply reflectors in order).
    void apply_qt(std::vector<double>& v) const {
        for (std::size_t j = 0; j < c; ++j) {
            if (tau[j] == 0.0) continue;
            double dot = v[j];
            for (std::size_t i = j + 1; i < m; ++i) {
                dot += at(i, j) * v[i];
            }
            dot *= tau[j];
            v[j] -= dot;
            for (std::size_t i = j + 1; i < m; ++i) {
                v[i] -= dot * at(i, j);
            }
        }
    }

    // v <- Q v (apply reflectors in reverse order).
    void apply_q(std::vector<double>& v) const {
        for (std::size_t jj = c; jj-- > 0;) {
            if (tau[jj] == 0.0) continue;
            double dot = v[jj];
            for (std::size_t i = jj + 1; i < m; ++i) {
                dot += at(i, jj) * v[i];
            }
            dot *= tau[jj];
            v[jj] -= dot;
            for (std::size_t i = jj + 1; i < m; ++i) {
                v[i] -= dot * at(i, jj);
            }
        }
    }

    // Solve R x = b[0..c) in place.
    void solve_r(std::vector<double>& b) const {
        for (std::size_t j = c; j-- > 0;) {
            for (std::size_t jj = j + 1; jj < c; ++jj) {
                b[j] -= at(j, jj) * b[jj];
            }
            b[j] /= at(j, j);
        }
    }

    // x <- R x (upper-triangular multiply), x of length c.
    void multiply_r(std::vector<double>& x) const {
        for (std::size_t i = 0; i < c; ++i) {
            double acc = 0.0;
            for (std::size_t j = i; j < c; ++j) {
                acc += at(i, j) * x[j];
            }
            x[i] = acc;
        }
    }
};

// Column-major design [1, X] restricted to rows with skip_row removed
// (skip_row == SIZE_MAX keeps everything).
HouseholderQr build_design(const DataMatrix& data, std::size_t skip_row) {
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    const std::size_t m = skip_row == static_cast<std::size_t>(-1) ? n : n - 1;
    HouseholderQr qr;
    qr.m = m;
    qr.c = p + 1;
    qr.a.assign(m * (p + 1), 0.0);
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == skip_row) continue;
        qr.a[r] = 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            qr.a[(j + 1) * m + r] = data.x(i, j);
        }
        ++r;
    }
    return qr;
}

std::vector<double> solve_beta(const HouseholderQr& qr, const DataMatrix& data,
                               std::size_t skip_row) {
    const std::size_t n = data.n_rows();
    std::vector<double> rhs;
    rhs.reserve(qr.m);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == skip_row) continue;
        rhs.push_back(data.y()[i]);
    }
    qr.apply_qt(rhs);
    rhs.resize(qr.c);
    qr.solve_r(rhs);
    return rhs;
}

constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

}  // namespace

OlsFit ols_fit(const DataMatrix& data) {
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    if (n <= p + 1) {
        throw DimensionError("ols_fit: need n > p + 1 (got n = " + std::to_string(n) +
                             ", p = " + std::to_string(p) + ")");
    }
    HouseholderQr qr = build_design(data, kNoRow);
    if (!qr.factor()) {
        throw SingularDesign("ols_fit: design matrix is rank deficient");
    }
    OlsFit fit;
    fit.n = n;
    fit.p = p;
    fit.beta = solve_beta(qr, data, kNoRow);

    fit.residuals.resize(n);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double yhat = fit.beta[0];
        for (std::size_t j = 0; j < p; ++j) {
            yhat += fit.beta[j + 1] * data.x(i, j);
        }
        fit.residuals[i] = yhat - data.y()[i];
        rss += fit.residuals[i] * fit.residuals[i];
    }
    fit.sigma2 = rss / static_cast<double>(n - p - 1);

    // h_kk = || row k of thin Q ||^2, obtained by pushing each basis vector
    // through Q' and reading the leading c entries.
    fit.hat_diag.assign(n, 0.0);
    std::vector<double> e(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::fill(e.begin(), e.end(), 0.0);
        e[k] = 1.0;
        qr.apply_qt(e);
        double h = 0.0;
        for (std::size_t j = 0; j < qr.c; ++j) {
            h += e[j] * e[j];
        }
        fit.hat_diag[k] = h;
    }
    return fit;
}

std::vector<double> cooks_distance_deletion(const DataMatrix& data) {
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    const OlsFit full = ols_fit(data);
    if (full.sigma2 == 0.0) {
        throw DegenerateFit("cooks_distance_deletion: zero residual variance");
    }
    HouseholderQr full_qr = build_design(data, kNoRow);
    if (!full_qr.factor()) {
        throw SingularDesign("cooks_distance_deletion: design matrix is rank deficient");
    }

    const double denom = static_cast<double>(p + 1) * full.sigma2;
    std::vector<double> d(n, 0.0);
    std::vector<double> diff(p + 1);
    for (std::size_t k = 0; k < n; ++k) {
        HouseholderQr qr = build_design(data, k);
        if (!qr.factor()) {
            throw SingularDesign("cooks_distance_deletion: design rank deficient after removing row " +
                                     std::to_string(k),
                                 static_cast<std::ptrdiff_t>(k));
        }
        const std::vector<double> beta_k = solve_beta(qr, data, k);
        for (std::size_t j = 0; j <= p; ++j) {
            diff[j] = beta_k[j] - full.beta[j];
        }
        // (b^(k)-b)' X'X (b^(k)-b) = || R (b^(k)-b) ||^2 with R from the full fit.
        std::vector<double> rd = diff;
        full_qr.multiply_r(rd);
        double quad = 0.0;
        for (double value : rd) {
            quad += value * value;
        }
        d[k] = quad / denom;
    }
    return d;
}

std::vector<double> cooks_distance_hat(const OlsFit& fit) {
    if (fit.sigma2 == 0.0) {
        throw DegenerateFit("cooks_distance_hat: zero residual variance");
    }
    const std::size_t n = fit.n;
    const double denom = static_cast<double>(fit.p + 1) * fit.sigma2;
    std::vector<double> d(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double h = fit.hat_diag[k];
        if (h > 1.0 - 1e-12) {
            throw ExactLeverage("cooks_distance_hat: leverage 1 at row " + std::to_string(k), k);
        }
        const double e = fit.residuals[k];
        const double one_minus = 1.0 - h;
        d[k] = (e * e / denom) * (h / (one_minus * one_minus));
    }
    return d;
}

}  // namespace him
