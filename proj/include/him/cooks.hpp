#pragma once

#include <cstddef>
#include <vector>

#include "him/types.hpp"

namespace him {

// Least-squares fit of y on [1, X] for the n > p + 1 regime.
// beta has the intercept first; residuals are yhat - y; hat_diag holds the
// diagonal of X(X'X)^-1 X'; sigma2 = RSS / (n - p - 1).
struct OlsFit {
    std::vector<double> beta;
    std::vector<double> residuals;
    std::vector<double> hat_diag;
    double sigma2 = 0.0;
    std::size_t n = 0;
    std::size_t p = 0;
};

// Householder-QR fit. Throws DimensionError when n <= p + 1 and
// SingularDesign when the design (with intercept) is rank deficient.
OlsFit ols_fit(const DataMatrix& data);

// Case-deletion form: refit with row k removed and evaluate
//   D_k = (beta^(k) - beta)' X'X (beta^(k) - beta) / ((p+1) sigma2).
// Each leave-one-out fit is a genuine refit; this routine is the oracle for
// the closed form below. Throws SingularDesign(k) if a refit is rank
// deficient.
std::vector<double> cooks_distance_deletion(const DataMatrix& data);

// Residual/leverage form with the same (p+1) sigma2 denominator:
//   D_k = e_k^2 / ((p+1) sigma2) * h_kk / (1 - h_kk)^2.
// Throws ExactLeverage(k) when h_kk reaches 1 and DegenerateFit when
// sigma2 = 0.
std::vector<double> cooks_distance_hat(const OlsFit& fit);

}  // namespace him
