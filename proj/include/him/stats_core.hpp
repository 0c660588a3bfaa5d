#pragma once

#include <span>
#include <utility>
#include <vector>

#include "him/types.hpp"

namespace him {

struct Moments {
    double mean;
    double sd;  // (n-1)-divisor sample standard deviation
};

struct RobustLocationScale {
    double median;
    double scale;  // 1.4826 * median absolute deviation
};

// Per-column location/scale estimates for a DataMatrix, recorded in reports
// so that results are auditable.
struct StandardizationSummary {
    std::vector<double> mu_x;
    std::vector<double> sigma_x;
    double mu_y = 0.0;
    double sigma_y = 0.0;
    Estimator estimator = Estimator::moment;
};

// Sample mean and (n-1)-divisor standard deviation. Throws InsufficientData
// for fewer than two values.
Moments column_moments(std::span<const double> v);

// Sample median (mean of the middle two for even n) and 1.4826 times the
// median absolute deviation; the constant makes the scale sigma-consistent
// under normality. Throws DegenerateScale when the MAD is zero.
RobustLocationScale robust_location_scale(std::span<const double> v);

// Location/scale estimates for every column and the response under the
// chosen estimator. Throws DegenerateScale naming the offending column.
StandardizationSummary summarize(const DataMatrix& data, Estimator estimator);

// Summary plus the matrix with each column (and y) mapped to location 0,
// scale 1 under the chosen estimator.
std::pair<StandardizationSummary, DataMatrix> standardize(const DataMatrix& data,
                                                          Estimator estimator);

// Marginal correlations rho_j = sum_i (X_ij - mu_xj)(Y_i - mu_y) / (n sigma_xj sigma_y).
// Note the n denominator: under moment estimates this is (n-1)/n times the
// textbook Pearson r, so |rho_j| <= (n-1)/n.
std::vector<double> marginal_correlations(const DataMatrix& data,
                                          const StandardizationSummary& summary);
std::vector<double> marginal_correlations(const DataMatrix& data, Estimator estimator);

// Upper tail of the chi-square distribution with one degree of freedom,
// sf(t) = erfc(sqrt(t/2)). Throws InvalidArgument for negative or non-finite t.
double chisq1_sf(double t);

}  // namespace him
