#include "him/glm_him.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace him {

namespace {

constexpr double kCoefCap = 10.0;
constexpr double kGradTol = 1e-8;
constexpr double kStepTol = 1e-8;
constexpr std::size_t kMaxIter = 50;

inline double sigmoid(double t) {
    return 1.0 / (1.0 + std::exp(-t));
}

// log(1 + e^t) without overflow.
inline double log1pexp(double t) {
    if (t > 35.0) return t;
    if (t < -35.0) return std::exp(t);
    return std::log1p(std::exp(t));
}

void check_binary_response(std::span<const double> y, const char* where) {
    bool has0 = false;
    bool has1 = false;
    for (double value : y) {
        if (value == 0.0) {
            has0 = true;
        } else if (value == 1.0) {
            has1 = true;
        } else {
            throw InvalidArgument(std::string(where) + ": response must be coded 0/1");
        }
    }
    if (!has0 || !has1) {
        throw DegenerateResponse(std::string(where) + ": response takes a single value");
    }
}

}  // namespace

namespace detail {

double logistic_nll(std::span<const double> x, std::span<const double> y,
                    double beta0, double beta1) {
    const std::size_t n = x.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double eta = beta0 + beta1 * x[i];
        acc += log1pexp(eta) - y[i] * eta;
    }
    return acc / static_cast<double>(n);
}

LogisticFit fit_logistic_2p(std::span<const double> x, std::span<const double> y,
                            double start0, double start1,
                            std::vector<double>* nll_trace) {
    const std::size_t n = x.size();
    const double nd = static_cast<double>(n);
    LogisticFit fit;
    fit.beta0 = start0;
    fit.beta1 = start1;

    double nll = logistic_nll(x, y, fit.beta0, fit.beta1);
    if (nll_trace) nll_trace->push_back(nll);

    bool capped = false;
    double last_step = std::numeric_limits<double>::infinity();
    for (fit.iterations = 0; fit.iterations < kMaxIter; ++fit.iterations) {
        double g0 = 0.0, g1 = 0.0;       // gradient of the mean NLL
        double h00 = 0.0, h01 = 0.0, h11 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double mu = sigmoid(fit.beta0 + fit.beta1 * x[i]);
            const double r = mu - y[i];
            const double w = mu * (1.0 - mu);
            g0 += r;
            g1 += r * x[i];
            h00 += w;
            h01 += w * x[i];
            h11 += w * x[i] * x[i];
        }
        g0 /= nd;
        g1 /= nd;
        h00 /= nd;
        h01 /= nd;
        h11 /= nd;

        const double det = h00 * h11 - h01 * h01;
        if (!(det > 1e-300)) {
            // Hessian collapsed (all fitted probabilities at 0/1).
            capped = true;
            break;
        }
        double d0 = (h11 * g0 - h01 * g1) / det;
        double d1 = (h00 * g1 - h01 * g0) / det;

        // Step halving keeps the likelihood non-decreasing.
        double step = 1.0;
        double next0 = fit.beta0 - d0;
        double next1 = fit.beta1 - d1;
        double next_nll = logistic_nll(x, y, next0, next1);
        std::size_t halvings = 0;
        while (next_nll > nll && halvings < 40) {
            step *= 0.5;
            next0 = fit.beta0 - step * d0;
            next1 = fit.beta1 - step * d1;
            next_nll = logistic_nll(x, y, next0, next1);
            ++halvings;
        }
        last_step = std::max(std::abs(next0 - fit.beta0), std::abs(next1 - fit.beta1));
        fit.beta0 = next0;
        fit.beta1 = next1;
        nll = next_nll;
        if (nll_trace) nll_trace->push_back(nll);

        if (std::abs(fit.beta0) > kCoefCap || std::abs(fit.beta1) > kCoefCap) {
            capped = true;
            break;
        }
        if (last_step <= kStepTol) {
            break;
        }
    }

    double g0 = 0.0, g1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = sigmoid(fit.beta0 + fit.beta1 * x[i]) - y[i];
        g0 += r;
        g1 += r * x[i];
    }
    g0 /= nd;
    g1 /= nd;
    fit.converged = !capped && std::sqrt(g0 * g0 + g1 * g1) <= kGradTol &&
                    std::abs(fit.beta0) <= kCoefCap && std::abs(fit.beta1) <= kCoefCap;
    return fit;
}

}  // namespace detail

LogisticFit fit_marginal_logistic(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgument("fit_marginal_logistic: need matching x, y with n >= 2");
    }
    check_binary_response(y, "fit_marginal_logistic");
    const double x0 = x[0];
    if (std::all_of(x.begin(), x.end(), [x0](double v) { return v == x0; })) {
        throw DegenerateScale("fit_marginal_logistic: constant predictor");
    }
    return detail::fit_logistic_2p(x, y, 0.0, 0.0, nullptr);
}

MarginalGlmFit fit_all_marginals(const DataMatrix& data) {
    const std::size_t p = data.n_cols();
    MarginalGlmFit fits;
    fits.beta0.resize(p);
    fits.beta1.resize(p);
    fits.converged.resize(p);
    fits.iterations.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        const LogisticFit f = detail::fit_logistic_2p(data.column(j), data.y(), 0.0, 0.0, nullptr);
        fits.beta0[j] = f.beta0;
        fits.beta1[j] = f.beta1;
        fits.converged[j] = f.converged ? 1 : 0;
        fits.iterations[j] = f.iterations;
    }
    return fits;
}

GlmInfluenceScores glm_him_scores(const DataMatrix& data) {
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    check_binary_response(data.y(), "glm_him_scores");

    const MarginalGlmFit full = fit_all_marginals(data);
    if (std::none_of(full.converged.begin(), full.converged.end(),
                     [](char c) { return c != 0; })) {
        throw FitFailure("glm_him_scores: no marginal fit converged on the full data");
    }

    GlmInfluenceScores scores;
    scores.n = n;
    scores.p = p;
    scores.d.assign(n, 0.0);

    std::vector<double> x_loo(n - 1), y_loo(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != k) y_loo[r++] = data.y()[i];
        }
        const bool response_ok =
            std::any_of(y_loo.begin(), y_loo.end(), [](double v) { return v == 0.0; }) &&
            std::any_of(y_loo.begin(), y_loo.end(), [](double v) { return v == 1.0; });

        double acc = 0.0;
        std::size_t used = 0;
        for (std::size_t j = 0; j < p; ++j) {
            if (!full.converged[j]) {
                scores.fit_failures.emplace_back(k, j);
                continue;
            }
            if (!response_ok) {
                scores.fit_failures.emplace_back(k, j);
                continue;
            }
            const auto col = data.column(j);
            r = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i != k) x_loo[r++] = col[i];
            }
            const double first = x_loo[0];
            if (std::all_of(x_loo.begin(), x_loo.end(),
                            [first](double v) { return v == first; })) {
                scores.fit_failures.emplace_back(k, j);
                continue;
            }
            const LogisticFit loo = detail::fit_logistic_2p(x_loo, y_loo,
                                                            full.beta0[j], full.beta1[j],
                                                            nullptr);
            if (!loo.converged) {
                scores.fit_failures.emplace_back(k, j);
                continue;
            }
            const double d0 = full.beta0[j] - loo.beta0;
            const double d1 = full.beta1[j] - loo.beta1;
            acc += d0 * d0 + d1 * d1;
            ++used;
        }
        if (used == 0) {
            throw FitFailure("glm_him_scores: every marginal refit failed for row " +
                             std::to_string(k));
        }
        scores.d[k] = acc / static_cast<double>(used);
    }
    return scores;
}

std::vector<std::size_t> rank_influential(const GlmInfluenceScores& scores, std::size_t m) {
    const std::size_t n = scores.d.size();
    if (m < 1 || m > n) {
        throw InvalidArgument("rank_influential: m must lie in [1, n]");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores.d[a] != scores.d[b]) return scores.d[a] > scores.d[b];
        return a < b;
    });
    order.resize(m);
    return order;
}

}  // namespace him
