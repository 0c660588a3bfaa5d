#include "him/stats_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace him {

std::string to_string(Estimator estimator) {
    return estimator == Estimator::moment ? "moment" : "robust";
}

DataMatrix::DataMatrix(std::size_t n_rows, std::size_t n_cols,
                       std::vector<double> x_col_major, std::vector<double> y,
                       std::vector<std::string> column_names)
    : n_(n_rows), p_(n_cols), x_(std::move(x_col_major)), y_(std::move(y)),
      names_(std::move(column_names)) {
    if (p_ == 0) {
        throw InvalidArgument("DataMatrix: need at least one predictor column");
    }
    if (x_.size() != n_ * p_ || y_.size() != n_) {
        throw InvalidArgument("DataMatrix: storage sizes do not match n and p");
    }
    if (!names_.empty() && names_.size() != p_) {
        throw InvalidArgument("DataMatrix: column_names length must equal p");
    }
    if (n_ < 3) {
        throw InsufficientData("DataMatrix: need at least 3 observations");
    }
    for (double value : x_) {
        if (!std::isfinite(value)) {
            throw InvalidArgument("DataMatrix: non-finite predictor entry");
        }
    }
    for (double value : y_) {
        if (!std::isfinite(value)) {
            throw InvalidArgument("DataMatrix: non-finite response entry");
        }
    }
    for (std::size_t j = 0; j < p_; ++j) {
        const auto col = column(j);
        const double first = col[0];
        bool constant = true;
        for (double value : col) {
            if (value != first) {
                constant = false;
                break;
            }
        }
        if (constant) {
            throw DegenerateScale("DataMatrix: column " + std::to_string(j) +
                                      " has zero sample variance",
                                  -1, static_cast<std::ptrdiff_t>(j));
        }
    }
    const double y0 = y_[0];
    if (std::all_of(y_.begin(), y_.end(), [y0](double v) { return v == y0; })) {
        throw DegenerateScale("DataMatrix: response has zero sample variance");
    }
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                 std::vector<double> y,
                                 std::vector<std::string> column_names) {
    const std::size_t n = rows.size();
    const std::size_t p = n == 0 ? 0 : rows.front().size();
    std::vector<double> x(n * p);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != p) {
            throw InvalidArgument("DataMatrix::from_rows: ragged rows");
        }
        for (std::size_t j = 0; j < p; ++j) {
            x[j * n + i] = rows[i][j];
        }
    }
    return DataMatrix(n, p, std::move(x), std::move(y), std::move(column_names));
}

Moments column_moments(std::span<const double> v) {
    if (v.size() < 2) {
        throw InsufficientData("column_moments: need at least two values");
    }
    const std::size_t n = v.size();
    long double sum = 0.0L;
    for (double value : v) {
        sum += value;
    }
    const double mean = static_cast<double>(sum / static_cast<long double>(n));
    long double ss = 0.0L;
    for (double value : v) {
        const long double d = static_cast<long double>(value) - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(static_cast<double>(ss / static_cast<long double>(n - 1)));
    return {mean, sd};
}

namespace {

double median_inplace(std::vector<double>& buffer) {
    const std::size_t n = buffer.size();
    std::sort(buffer.begin(), buffer.end());
    if (n % 2 == 1) {
        return buffer[n / 2];
    }
    return 0.5 * (buffer[n / 2 - 1] + buffer[n / 2]);
}

}  // namespace

RobustLocationScale robust_location_scale(std::span<const double> v) {
    if (v.size() < 2) {
        throw InsufficientData("robust_location_scale: need at least two values");
    }
    std::vector<double> buffer(v.begin(), v.end());
    const double med = median_inplace(buffer);
    for (double& value : buffer) {
        value = std::abs(value - med);
    }
    const double mad = median_inplace(buffer);
    // Normal-consistency constant: MAD of N(mu, sigma^2) is sigma/1.4826.
    const double scale = 1.4826 * mad;
    if (scale == 0.0) {
        throw DegenerateScale("robust_location_scale: zero median absolute deviation");
    }
    return {med, scale};
}

StandardizationSummary summarize(const DataMatrix& data, Estimator estimator) {
    const std::size_t p = data.n_cols();
    StandardizationSummary summary;
    summary.estimator = estimator;
    summary.mu_x.resize(p);
    summary.sigma_x.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        try {
            if (estimator == Estimator::moment) {
                const Moments m = column_moments(data.column(j));
                summary.mu_x[j] = m.mean;
                summary.sigma_x[j] = m.sd;
            } else {
                const RobustLocationScale r = robust_location_scale(data.column(j));
                summary.mu_x[j] = r.median;
                summary.sigma_x[j] = r.scale;
            }
        } catch (const DegenerateScale&) {
            throw DegenerateScale("summarize: degenerate scale in column " + std::to_string(j),
                                  -1, static_cast<std::ptrdiff_t>(j));
        }
        if (summary.sigma_x[j] == 0.0) {
            throw DegenerateScale("summarize: zero scale in column " + std::to_string(j),
                                  -1, static_cast<std::ptrdiff_t>(j));
        }
    }
    if (estimator == Estimator::moment) {
        const Moments m = column_moments(data.y());
        summary.mu_y = m.mean;
        summary.sigma_y = m.sd;
    } else {
        const RobustLocationScale r = robust_location_scale(data.y());
        summary.mu_y = r.median;
        summary.sigma_y = r.scale;
    }
    if (summary.sigma_y == 0.0) {
        throw DegenerateScale("summarize: zero scale in response");
    }
    return summary;
}

std::pair<StandardizationSummary, DataMatrix> standardize(const DataMatrix& data,
                                                          Estimator estimator) {
    const StandardizationSummary summary = summarize(data, estimator);
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    std::vector<double> x(n * p);
    for (std::size_t j = 0; j < p; ++j) {
        const auto col = data.column(j);
        const double mu = summary.mu_x[j];
        const double inv = 1.0 / summary.sigma_x[j];
        for (std::size_t i = 0; i < n; ++i) {
            x[j * n + i] = (col[i] - mu) * inv;
        }
    }
    std::vector<double> y(n);
    const double inv_y = 1.0 / summary.sigma_y;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = (data.y()[i] - summary.mu_y) * inv_y;
    }
    return {summary, DataMatrix(n, p, std::move(x), std::move(y), data.column_names())};
}

std::vector<double> marginal_correlations(const DataMatrix& data,
                                          const StandardizationSummary& summary) {
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    if (summary.mu_x.size() != p || summary.sigma_x.size() != p) {
        throw InvalidArgument("marginal_correlations: summary does not match data");
    }
    std::vector<double> rho(p);
    const double mu_y = summary.mu_y;
    const std::vector<double>& y = data.y();
    for (std::size_t j = 0; j < p; ++j) {
        const auto col = data.column(j);
        const double mu = summary.mu_x[j];
        long double cross = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            cross += static_cast<long double>(col[i] - mu) * (y[i] - mu_y);
        }
        rho[j] = static_cast<double>(cross /
                 (static_cast<long double>(n) * summary.sigma_x[j] * summary.sigma_y));
    }
    return rho;
}

std::vector<double> marginal_correlations(const DataMatrix& data, Estimator estimator) {
    return marginal_correlations(data, summarize(data, estimator));
}

double chisq1_sf(double t) {
    if (!std::isfinite(t) || t < 0.0) {
        throw InvalidArgument("chisq1_sf: argument must be finite and nonnegative");
    }
    return std::erfc(std::sqrt(0.5 * t));
}

}  // namespace him
