#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "him/types.hpp"

namespace him {

// The d predictors with the largest absolute marginal correlations, ties
// broken by lower index.
struct ScreeningResult {
    std::vector<std::size_t> selected;
    std::vector<double> abs_corr;
};

ScreeningResult sis_screen(const DataMatrix& data, std::size_t d);

// sign(z) * max(|z| - t, 0).
double soft_threshold(double z, double t);

// L1-penalized least squares fit. Coefficients are reported on the original
// predictor scale; the solve itself runs on internally standardized columns
// (mean 0, n-divisor scale 1) with centered response and objective
// (1/2n)||y - b0 - X b||^2 + lambda ||b||_1.
struct LassoFit {
    std::vector<double> beta;
    double intercept = 0.0;
    double lambda = 0.0;
    std::vector<double> lambda_path;  // descending; single-lambda fits store {lambda}
    std::vector<double> cv_errors;    // aligned with lambda_path; empty without CV
    std::size_t folds = 0;
    std::uint64_t seed = 0;
};

// Cyclic coordinate descent at a single lambda, cold-started from zero.
// Converges when the largest coefficient change in a sweep is at most tol;
// throws ConvergenceFailure past max_iter sweeps.
LassoFit lasso_cd(const DataMatrix& data, double lambda, double tol = 1e-7,
                  std::size_t max_iter = 100000);

// Log-spaced path of n_lambda values from lambda_max down to 1e-3*lambda_max
// with warm starts, K-fold cross-validation with seeded fold assignment, and
// a full-data refit at the CV-minimizing lambda (smallest path index on
// ties). Fold assignment depends only on (seed, n, folds).
LassoFit lasso_path_cv(const DataMatrix& data, std::size_t n_lambda = 100,
                       std::size_t folds = 10, std::uint64_t seed = 0);

// Largest KKT violation of a fit on the standardized scale (unit-scale
// predictors and response): for active coordinates | |gradient_j| - lambda |,
// for inactive ones the excess of |gradient_j| over lambda. Near zero for a
// converged fit.
double lasso_kkt_violation(const DataMatrix& data, const LassoFit& fit);

// || beta_hat - beta_true ||_2 (no intercept term).
double eval_err(std::span<const double> beta_hat, std::span<const double> beta_true);

// |selected \ truth| / (p - |truth|).
double eval_fpr(std::span<const std::size_t> selected,
                std::span<const std::size_t> true_support, std::size_t p);

// 1 iff truth is contained in selected.
int eval_cp(std::span<const std::size_t> selected,
            std::span<const std::size_t> true_support);

struct PowerFdr {
    double power = 0.0;
    double fdr = 0.0;
};

// power = |flagged ∩ truth| / |truth| (truth must be nonempty);
// fdr = |flagged \ truth| / |flagged| with the 0/0 := 0 convention.
PowerFdr eval_power_fdr(std::span<const std::size_t> flagged,
                        std::span<const std::size_t> true_influential);

namespace detail {

// Design standardized for the coordinate-descent solver: predictor columns
// at mean 0, n-divisor scale 1, and the centered response divided by its own
// n-divisor scale so that tolerances and penalties are scale-free (the
// original problem is recovered through the positive homogeneity of the
// soft threshold). Columns with zero scale inside a CV fold are dropped from
// the solve (their coefficient stays zero); the full-data constructor
// rejects them earlier at DataMatrix level.
struct StandardizedDesign {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> xs;      // column-major standardized predictors
    std::vector<double> ys;      // centered response / scale_y
    std::vector<double> mean_x;
    std::vector<double> scale_x; // n-divisor scale; 0 marks a dropped column
    double mean_y = 0.0;
    double scale_y = 1.0;

    static StandardizedDesign build(const DataMatrix& data,
                                    std::span<const std::size_t> rows);
    static StandardizedDesign build(const DataMatrix& data);

    // Smallest penalty with an all-zero solution, on the original y scale.
    double lambda_max() const;
};

// One coordinate-descent solve at the unit-response penalty; beta is the
// warm start in standardized coordinates and holds the solution on return.
// Converges when the largest coefficient change in a sweep is at most tol,
// or when a sweep can no longer decrease the objective beyond round-off
// (degenerate active sets at tiny penalties cycle in floating point; the
// objective is monotone, so a stalled sweep means the iterate is already a
// numerical minimizer, which coordinate-wise optimality makes global for
// this separable objective). Returns the number of sweeps used. An optional
// trace records the objective after every sweep.
std::size_t cd_solve(const StandardizedDesign& design, double lambda, double tol,
                     std::size_t max_iter, std::vector<double>& beta,
                     std::vector<double>* objective_trace = nullptr);

double cd_objective(const StandardizedDesign& design, double lambda,
                    std::span<const double> beta);

std::vector<std::size_t> cv_fold_assignment(std::uint64_t seed, std::size_t n,
                                            std::size_t folds);

}  // namespace detail

}  // namespace him
