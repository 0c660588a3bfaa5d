#include "him/him.hpp"

#include <cmath>
#include <string>

namespace him {

namespace {

void check_row_index(const DataMatrix& data, std::size_t k, const char* where) {
    if (k >= data.n_rows()) {
        throw InvalidArgument(std::string(where) + ": row index " + std::to_string(k) +
                              " out of range for n = " + std::to_string(data.n_rows()));
    }
}

// Location/scale of a column with row k skipped, under the given estimator.
struct LooStats {
    double location;
    double scale;
};

LooStats loo_location_scale(std::span<const double> column, std::size_t k,
                            Estimator estimator, std::vector<double>& scratch) {
    scratch.clear();
    for (std::size_t i = 0; i < column.size(); ++i) {
        if (i != k) {
            scratch.push_back(column[i]);
        }
    }
    if (estimator == Estimator::moment) {
        const Moments m = column_moments(scratch);
        return {m.mean, m.sd};
    }
    const RobustLocationScale r = robust_location_scale(scratch);
    return {r.median, r.scale};
}

InfluenceScores make_scores(std::vector<double> d, Estimator estimator,
                            std::size_t n, std::size_t p) {
    InfluenceScores scores;
    scores.estimator = estimator;
    scores.n = n;
    scores.p = p;
    scores.stat.resize(d.size());
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    for (std::size_t k = 0; k < d.size(); ++k) {
        scores.stat[k] = n2 * d[k];
    }
    scores.d = std::move(d);
    return scores;
}

}  // namespace

std::vector<double> loo_correlation(const DataMatrix& data, std::size_t k,
                                    Estimator estimator) {
    check_row_index(data, k, "loo_correlation");
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    const std::size_t m = n - 1;

    std::vector<double> scratch;
    scratch.reserve(m);

    LooStats ys;
    try {
        ys = loo_location_scale(data.y(), k, estimator, scratch);
    } catch (const DegenerateScale&) {
        throw DegenerateScale("loo_correlation: response degenerate after removing row " +
                                  std::to_string(k),
                              static_cast<std::ptrdiff_t>(k), -1);
    }
    if (ys.scale == 0.0) {
        throw DegenerateScale("loo_correlation: response degenerate after removing row " +
                                  std::to_string(k),
                              static_cast<std::ptrdiff_t>(k), -1);
    }

    const std::vector<double>& y = data.y();
    std::vector<double> rho(p);
    for (std::size_t j = 0; j < p; ++j) {
        const auto col = data.column(j);
        LooStats xs;
        try {
            xs = loo_location_scale(col, k, estimator, scratch);
        } catch (const DegenerateScale&) {
            throw DegenerateScale("loo_correlation: column " + std::to_string(j) +
                                      " degenerate after removing row " + std::to_string(k),
                                  static_cast<std::ptrdiff_t>(k),
                                  static_cast<std::ptrdiff_t>(j));
        }
        if (xs.scale == 0.0) {
            throw DegenerateScale("loo_correlation: column " + std::to_string(j) +
                                      " degenerate after removing row " + std::to_string(k),
                                  static_cast<std::ptrdiff_t>(k),
                                  static_cast<std::ptrdiff_t>(j));
        }
        long double cross = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            cross += static_cast<long double>(col[i] - xs.location) * (y[i] - ys.location);
        }
        rho[j] = static_cast<double>(cross /
                 (static_cast<long double>(m) * xs.scale * ys.scale));
    }
    return rho;
}

InfluenceScores him_scores_naive(const DataMatrix& data, Estimator estimator) {
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    const auto [summary, std_data] = standardize(data, estimator);
    const double nd = static_cast<double>(n);
    const std::vector<double>& ys = std_data.y();

    // Full-sample and leave-one-out sums formed independently per (k, j);
    // the fast path instead uses the closed form of their difference.
    std::vector<long double> full(p, 0.0L);
    for (std::size_t j = 0; j < p; ++j) {
        const auto col = std_data.column(j);
        for (std::size_t i = 0; i < n; ++i) {
            full[j] += static_cast<long double>(col[i]) * ys[i];
        }
    }

    std::vector<double> d(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        long double acc = 0.0L;
        for (std::size_t j = 0; j < p; ++j) {
            const auto col = std_data.column(j);
            long double loo = 0.0L;
            for (std::size_t i = 0; i < n; ++i) {
                if (i != k) {
                    loo += static_cast<long double>(col[i]) * ys[i];
                }
            }
            const long double diff = (full[j] - loo) / nd;
            acc += diff * diff;
        }
        d[k] = static_cast<double>(acc / static_cast<long double>(p));
    }
    return make_scores(std::move(d), estimator, n, p);
}

InfluenceScores him_scores(const DataMatrix& data, Estimator estimator) {
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    const auto [summary, std_data] = standardize(data, estimator);
    const double nd = static_cast<double>(n);

    // rho_j - rho_j^(k) = Xs_kj Ys_k / n, so d[k] reduces to the squared
    // norm of the deleted row on the standardized scale.
    std::vector<double> d(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        long double row_norm2 = 0.0L;
        for (std::size_t j = 0; j < p; ++j) {
            const long double v = std_data.x(k, j);
            row_norm2 += v * v;
        }
        const double yk = std_data.y()[k];
        d[k] = static_cast<double>(static_cast<long double>(yk) * yk * row_norm2 /
                                   (static_cast<long double>(p) * nd * nd));
    }
    return make_scores(std::move(d), estimator, n, p);
}

BDecomposition b_decomposition(std::size_t n, std::size_t p,
                               std::span<const double> x_col_major,
                               std::span<const double> y, std::size_t k) {
    if (n < 3) {
        throw InsufficientData("b_decomposition: need at least 3 observations");
    }
    if (k >= n) {
        throw InvalidArgument("b_decomposition: row index out of range");
    }
    if (x_col_major.size() != n * p || y.size() != n) {
        throw InvalidArgument("b_decomposition: storage sizes do not match n and p");
    }
    const double nd = static_cast<double>(n);
    const double pd = static_cast<double>(p);

    // K_tt for all t, plus the column projections S_j = sum_t Y_t X_tj that
    // turn the double sums of b3 and b4 into O(np) work.
    std::vector<long double> k_diag(n, 0.0L);
    long double sum_s2 = 0.0L;      // sum_j S_j^2
    long double proj_k = 0.0L;      // sum_j X_kj S_j
    for (std::size_t j = 0; j < p; ++j) {
        const double* col = x_col_major.data() + j * n;
        long double s_j = 0.0L;
        for (std::size_t t = 0; t < n; ++t) {
            const long double x = col[t];
            k_diag[t] += x * x;
            s_j += static_cast<long double>(y[t]) * x;
        }
        sum_s2 += s_j * s_j;
        proj_k += static_cast<long double>(col[k]) * s_j;
    }

    long double sum_y2k = 0.0L;  // sum_t Y_t^2 K_tt (times p)
    for (std::size_t t = 0; t < n; ++t) {
        sum_y2k += static_cast<long double>(y[t]) * y[t] * k_diag[t];
    }

    const long double c1 = 1.0L / (static_cast<long double>(nd) * (nd - 1.0) *
                                   nd * (nd - 1.0));
    BDecomposition out;
    out.k = k;
    out.b1 = static_cast<double>(c1 * sum_y2k / pd);
    out.b2 = static_cast<double>((nd - 2.0) / (nd * (nd - 1.0) * (nd - 1.0)) *
                                 static_cast<long double>(y[k]) * y[k] * k_diag[k] / pd);
    out.b3 = static_cast<double>(c1 * (sum_s2 - sum_y2k) / pd);
    out.b4 = static_cast<double>(1.0L / (nd * (nd - 1.0) * (nd - 1.0)) *
                                 static_cast<long double>(y[k]) *
                                 (proj_k - static_cast<long double>(y[k]) * k_diag[k]) / pd);
    return out;
}

BDecomposition b_decomposition(const DataMatrix& standardized, std::size_t k) {
    return b_decomposition(standardized.n_rows(), standardized.n_cols(),
                           standardized.x_data(), standardized.y(), k);
}

}  // namespace him
