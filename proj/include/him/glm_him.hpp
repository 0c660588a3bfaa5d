#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "him/types.hpp"

namespace him {

// Two-parameter logistic fit of y on (1, x) by Newton iteration with step
// halving. converged requires the gradient of the mean log-likelihood to be
// below 1e-8 with both coefficients inside the divergence cap of 10 (beyond
// which fitted probabilities are within 5e-5 of 0/1 and the MLE is
// effectively infinite, e.g. under complete separation).
struct LogisticFit {
    double beta0 = 0.0;
    double beta1 = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

LogisticFit fit_marginal_logistic(std::span<const double> x, std::span<const double> y);

// One marginal fit per predictor.
struct MarginalGlmFit {
    std::vector<double> beta0;
    std::vector<double> beta1;
    std::vector<char> converged;
    std::vector<std::size_t> iterations;
};

MarginalGlmFit fit_all_marginals(const DataMatrix& data);

// d[k] = mean over usable predictors j of the squared coefficient change
// ||(b_j0, b_j1) - (b_j0^(k), b_j1^(k))||^2 when observation k is dropped
// and the marginal fit is redone (warm-started from the full fit). A pair
// (k, j) whose full or leave-one-out fit fails to converge is excluded and
// the divisor reduced; exclusions are recorded in fit_failures.
struct GlmInfluenceScores {
    std::vector<double> d;
    std::vector<std::pair<std::size_t, std::size_t>> fit_failures;  // (k, j)
    std::size_t n = 0;
    std::size_t p = 0;
};

// Requires binary y with both classes present; throws DegenerateResponse
// otherwise and FitFailure when no predictor yields a usable fit.
GlmInfluenceScores glm_him_scores(const DataMatrix& data);

// Indices of the m largest scores, ties broken by lower index.
std::vector<std::size_t> rank_influential(const GlmInfluenceScores& scores, std::size_t m);

namespace detail {

// Newton core with optional warm start and per-iteration negative
// log-likelihood trace (mean scale). Exposed for tests.
LogisticFit fit_logistic_2p(std::span<const double> x, std::span<const double> y,
                            double start0, double start1,
                            std::vector<double>* nll_trace);

// Mean negative log-likelihood of the two-parameter model.
double logistic_nll(std::span<const double> x, std::span<const double> y,
                    double beta0, double beta1);

}  // namespace detail

}  // namespace him
