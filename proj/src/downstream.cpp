#include "him/downstream.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "him/rng.hpp"
#include "him/stats_core.hpp"

namespace him {

ScreeningResult sis_screen(const DataMatrix& data, std::size_t d) {
    const std::size_t p = data.n_cols();
    if (d < 1 || d > p) {
        throw InvalidArgument("sis_screen: d must lie in [1, p]");
    }
    const std::vector<double> rho = marginal_correlations(data, Estimator::moment);
    ScreeningResult result;
    result.abs_corr.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        result.abs_corr[j] = std::abs(rho[j]);
    }
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (result.abs_corr[a] != result.abs_corr[b]) {
            return result.abs_corr[a] > result.abs_corr[b];
        }
        return a < b;
    });
    order.resize(d);
    result.selected = std::move(order);
    return result;
}

double soft_threshold(double z, double t) {
    if (t < 0.0) {
        throw InvalidArgument("soft_threshold: threshold must be nonnegative");
    }
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

namespace detail {

StandardizedDesign StandardizedDesign::build(const DataMatrix& data,
                                             std::span<const std::size_t> rows) {
    const std::size_t n = rows.size();
    const std::size_t p = data.n_cols();
    StandardizedDesign d;
    d.n = n;
    d.p = p;
    d.xs.assign(n * p, 0.0);
    d.ys.resize(n);
    d.mean_x.resize(p);
    d.scale_x.resize(p);

    double ysum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        ysum += data.y()[rows[r]];
    }
    d.mean_y = ysum / static_cast<double>(n);
    double yss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        d.ys[r] = data.y()[rows[r]] - d.mean_y;
        yss += d.ys[r] * d.ys[r];
    }
    d.scale_y = std::sqrt(yss / static_cast<double>(n));
    if (d.scale_y > 0.0) {
        const double inv = 1.0 / d.scale_y;
        for (double& v : d.ys) {
            v *= inv;
        }
    } else {
        d.scale_y = 1.0;
    }

    for (std::size_t j = 0; j < p; ++j) {
        const auto col = data.column(j);
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            sum += col[rows[r]];
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double c = col[rows[r]] - mean;
            ss += c * c;
        }
        const double scale = std::sqrt(ss / static_cast<double>(n));
        d.mean_x[j] = mean;
        d.scale_x[j] = scale;
        if (scale > 0.0) {
            const double inv = 1.0 / scale;
            double* out = d.xs.data() + j * n;
            for (std::size_t r = 0; r < n; ++r) {
                out[r] = (col[rows[r]] - mean) * inv;
            }
        }
    }
    return d;
}

StandardizedDesign StandardizedDesign::build(const DataMatrix& data) {
    std::vector<std::size_t> rows(data.n_rows());
    std::iota(rows.begin(), rows.end(), 0);
    return build(data, rows);
}

double StandardizedDesign::lambda_max() const {
    double best = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        if (scale_x[j] == 0.0) continue;
        const double* col = xs.data() + j * n;
        double dot = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            dot += col[r] * ys[r];
        }
        best = std::max(best, std::abs(dot) / static_cast<double>(n));
    }
    return best * scale_y;
}

double cd_objective(const StandardizedDesign& design, double lambda,
                    std::span<const double> beta) {
    const std::size_t n = design.n;
    std::vector<double> r = design.ys;
    for (std::size_t j = 0; j < design.p; ++j) {
        if (beta[j] == 0.0) continue;
        const double* col = design.xs.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) {
            r[i] -= col[i] * beta[j];
        }
    }
    double rss = 0.0;
    for (double value : r) {
        rss += value * value;
    }
    double l1 = 0.0;
    for (double value : beta) {
        l1 += std::abs(value);
    }
    return 0.5 * rss / static_cast<double>(n) + lambda * l1;
}

namespace {

// One cyclic pass over the given coordinates. Standardization makes
// (1/n) x_j'x_j = 1, so the coordinate update is a single soft-threshold,
// and the exact objective decrease of each update has the closed form
// evaluated below. Returns the largest coefficient change and accumulates
// the total decrease.
double cd_sweep(const StandardizedDesign& design, double lambda,
                std::span<const std::size_t> coords, std::vector<double>& beta,
                std::vector<double>& resid, double& decrease) {
    const std::size_t n = design.n;
    const double nd = static_cast<double>(n);
    double max_change = 0.0;
    for (std::size_t j : coords) {
        const double* col = design.xs.data() + j * n;
        const double old = beta[j];
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += col[i] * resid[i];
        }
        const double z = dot / nd + old;
        const double next = soft_threshold(z, lambda);
        if (next != old) {
            const double delta = next - old;
            for (std::size_t i = 0; i < n; ++i) {
                resid[i] -= delta * col[i];
            }
            beta[j] = next;
            max_change = std::max(max_change, std::abs(delta));
            decrease += (0.5 * old * old - z * old + lambda * std::abs(old)) -
                        (0.5 * next * next - z * next + lambda * std::abs(next));
        }
    }
    return max_change;
}

}  // namespace

std::size_t cd_solve(const StandardizedDesign& design, double lambda, double tol,
                     std::size_t max_iter, std::vector<double>& beta,
                     std::vector<double>* objective_trace) {
    const std::size_t n = design.n;
    const std::size_t p = design.p;
    // On the unit-response scale the objective starts at 1/2, so an absolute
    // stall threshold is meaningful.
    constexpr double kStall = 1e-15;

    std::vector<std::size_t> all_coords;
    all_coords.reserve(p);
    for (std::size_t j = 0; j < p; ++j) {
        if (design.scale_x[j] > 0.0) {
            all_coords.push_back(j);
        } else {
            beta[j] = 0.0;
        }
    }

    std::vector<double> resid = design.ys;
    for (std::size_t j : all_coords) {
        if (beta[j] == 0.0) continue;
        const double* col = design.xs.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) {
            resid[i] -= col[i] * beta[j];
        }
    }

    std::size_t sweeps = 0;
    auto note_sweep = [&]() {
        ++sweeps;
        if (objective_trace) {
            objective_trace->push_back(cd_objective(design, lambda, beta));
        }
    };

    std::vector<std::size_t> active;
    while (sweeps < max_iter) {
        double decrease = 0.0;
        const double full_change = cd_sweep(design, lambda, all_coords, beta, resid, decrease);
        note_sweep();
        if (full_change <= tol || decrease <= kStall) {
            return sweeps;
        }
        // Iterate on the active set until it settles, then re-check everyone.
        active.clear();
        for (std::size_t j : all_coords) {
            if (beta[j] != 0.0) active.push_back(j);
        }
        while (sweeps < max_iter) {
            decrease = 0.0;
            const double change = cd_sweep(design, lambda, active, beta, resid, decrease);
            note_sweep();
            if (change <= tol || decrease <= kStall) break;
        }
    }
    throw ConvergenceFailure("lasso coordinate descent: no convergence within " +
                                 std::to_string(max_iter) + " sweeps (lambda = " +
                                 std::to_string(lambda) + ")",
                             max_iter);
}

std::vector<std::size_t> cv_fold_assignment(std::uint64_t seed, std::size_t n,
                                            std::size_t folds) {
    Rng rng(Rng::derive(seed, 0x666f6c64ULL, (static_cast<std::uint64_t>(n) << 8) | folds));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i-- > 1;) {
        const std::size_t j = static_cast<std::size_t>(rng.next() % (i + 1));
        std::swap(perm[i], perm[j]);
    }
    std::vector<std::size_t> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        fold_of[perm[i]] = i % folds;
    }
    return fold_of;
}

}  // namespace detail

namespace {

// Back-transform a standardized-scale solution to the original scale.
void finish_fit(const detail::StandardizedDesign& design,
                std::span<const double> beta_std, LassoFit& fit) {
    const std::size_t p = design.p;
    fit.beta.assign(p, 0.0);
    double dot_mean = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        if (beta_std[j] == 0.0 || design.scale_x[j] == 0.0) continue;
        fit.beta[j] = beta_std[j] * design.scale_y / design.scale_x[j];
        dot_mean += fit.beta[j] * design.mean_x[j];
    }
    fit.intercept = design.mean_y - dot_mean;
}

}  // namespace

LassoFit lasso_cd(const DataMatrix& data, double lambda, double tol,
                  std::size_t max_iter) {
    if (!(lambda > 0.0)) {
        throw InvalidArgument("lasso_cd: lambda must be positive");
    }
    const detail::StandardizedDesign design = detail::StandardizedDesign::build(data);
    std::vector<double> beta(design.p, 0.0);
    detail::cd_solve(design, lambda / design.scale_y, tol, max_iter, beta);
    LassoFit fit;
    fit.lambda = lambda;
    fit.lambda_path = {lambda};
    finish_fit(design, beta, fit);
    return fit;
}

LassoFit lasso_path_cv(const DataMatrix& data, std::size_t n_lambda, std::size_t folds,
                       std::uint64_t seed) {
    const std::size_t n = data.n_rows();
    if (n_lambda < 2) {
        throw InvalidArgument("lasso_path_cv: need at least two path points");
    }
    if (folds < 2 || folds > n) {
        throw InvalidArgument("lasso_path_cv: folds must lie in [2, n]");
    }
    constexpr double kTol = 1e-7;
    constexpr std::size_t kMaxIter = 100000;
    constexpr double kPathFloor = 1e-3;

    const detail::StandardizedDesign full = detail::StandardizedDesign::build(data);
    const double lmax = full.lambda_max();
    if (!(lmax > 0.0)) {
        throw DegenerateScale("lasso_path_cv: all marginal gradients vanish");
    }
    std::vector<double> path(n_lambda);
    for (std::size_t l = 0; l < n_lambda; ++l) {
        path[l] = lmax * std::pow(kPathFloor, static_cast<double>(l) /
                                                  static_cast<double>(n_lambda - 1));
    }

    const std::vector<std::size_t> fold_of = detail::cv_fold_assignment(seed, n, folds);

    // Pooled squared validation error per path point.
    std::vector<double> cv_sse(n_lambda, 0.0);
    std::vector<std::size_t> train_rows, val_rows;
    for (std::size_t f = 0; f < folds; ++f) {
        train_rows.clear();
        val_rows.clear();
        for (std::size_t i = 0; i < n; ++i) {
            (fold_of[i] == f ? val_rows : train_rows).push_back(i);
        }
        if (train_rows.size() < 2 || val_rows.empty()) {
            throw InvalidArgument("lasso_path_cv: a fold has too few rows");
        }
        const detail::StandardizedDesign design =
            detail::StandardizedDesign::build(data, train_rows);
        std::vector<double> beta(design.p, 0.0);
        LassoFit scratch;
        for (std::size_t l = 0; l < n_lambda; ++l) {
            detail::cd_solve(design, path[l] / design.scale_y, kTol, kMaxIter, beta);
            finish_fit(design, beta, scratch);
            for (std::size_t i : val_rows) {
                double pred = scratch.intercept;
                for (std::size_t j = 0; j < design.p; ++j) {
                    if (scratch.beta[j] != 0.0) {
                        pred += scratch.beta[j] * data.x(i, j);
                    }
                }
                const double err = data.y()[i] - pred;
                cv_sse[l] += err * err;
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t l = 1; l < n_lambda; ++l) {
        if (cv_sse[l] < cv_sse[best]) {
            best = l;
        }
    }

    // Full-data refit along the path down to the selected lambda.
    std::vector<double> beta(full.p, 0.0);
    for (std::size_t l = 0; l <= best; ++l) {
        detail::cd_solve(full, path[l] / full.scale_y, kTol, kMaxIter, beta);
    }

    LassoFit fit;
    fit.lambda = path[best];
    fit.lambda_path = std::move(path);
    fit.cv_errors.resize(n_lambda);
    for (std::size_t l = 0; l < n_lambda; ++l) {
        fit.cv_errors[l] = cv_sse[l] / static_cast<double>(n);
    }
    fit.folds = folds;
    fit.seed = seed;
    finish_fit(full, beta, fit);
    return fit;
}

double lasso_kkt_violation(const DataMatrix& data, const LassoFit& fit) {
    const detail::StandardizedDesign design = detail::StandardizedDesign::build(data);
    const std::size_t n = design.n;
    const double lambda = fit.lambda / design.scale_y;
    // Rebuild the standardized-scale coefficients and residual.
    std::vector<double> beta_std(design.p, 0.0);
    std::vector<double> resid = design.ys;
    for (std::size_t j = 0; j < design.p; ++j) {
        if (fit.beta[j] == 0.0 || design.scale_x[j] == 0.0) continue;
        beta_std[j] = fit.beta[j] * design.scale_x[j] / design.scale_y;
        const double* col = design.xs.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) {
            resid[i] -= col[i] * beta_std[j];
        }
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < design.p; ++j) {
        if (design.scale_x[j] == 0.0) continue;
        const double* col = design.xs.data() + j * n;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += col[i] * resid[i];
        }
        const double grad = dot / static_cast<double>(n);
        if (beta_std[j] != 0.0) {
            worst = std::max(worst, std::abs(std::abs(grad) - lambda));
        } else {
            worst = std::max(worst, std::max(0.0, std::abs(grad) - lambda));
        }
    }
    return worst;
}

double eval_err(std::span<const double> beta_hat, std::span<const double> beta_true) {
    if (beta_hat.size() != beta_true.size()) {
        throw InvalidArgument("eval_err: vector lengths differ");
    }
    long double acc = 0.0L;
    for (std::size_t j = 0; j < beta_hat.size(); ++j) {
        const long double d = static_cast<long double>(beta_hat[j]) - beta_true[j];
        acc += d * d;
    }
    return std::sqrt(static_cast<double>(acc));
}

double eval_fpr(std::span<const std::size_t> selected,
                std::span<const std::size_t> true_support, std::size_t p) {
    const std::unordered_set<std::size_t> truth(true_support.begin(), true_support.end());
    if (truth.size() >= p) {
        throw InvalidArgument("eval_fpr: no true negatives");
    }
    std::size_t fp = 0;
    for (std::size_t idx : selected) {
        if (idx >= p) {
            throw InvalidArgument("eval_fpr: selected index out of range");
        }
        if (!truth.count(idx)) {
            ++fp;
        }
    }
    return static_cast<double>(fp) / static_cast<double>(p - truth.size());
}

int eval_cp(std::span<const std::size_t> selected,
            std::span<const std::size_t> true_support) {
    const std::unordered_set<std::size_t> chosen(selected.begin(), selected.end());
    for (std::size_t idx : true_support) {
        if (!chosen.count(idx)) {
            return 0;
        }
    }
    return 1;
}

PowerFdr eval_power_fdr(std::span<const std::size_t> flagged,
                        std::span<const std::size_t> true_influential) {
    if (true_influential.empty()) {
        throw InvalidArgument("eval_power_fdr: empty truth set");
    }
    const std::unordered_set<std::size_t> truth(true_influential.begin(),
                                                true_influential.end());
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t idx : flagged) {
        if (truth.count(idx)) {
            ++tp;
        } else {
            ++fp;
        }
    }
    PowerFdr out;
    out.power = static_cast<double>(tp) / static_cast<double>(truth.size());
    out.fdr = flagged.empty() ? 0.0
                              : static_cast<double>(fp) / static_cast<double>(flagged.size());
    return out;
}

}  // namespace him
