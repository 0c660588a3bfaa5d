#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "him/cooks.hpp"
#include "oracles.hpp"

using namespace him;

namespace {

// Random regression data with signal so sigma2 > 0 but fits are sensible.
DataMatrix regression_data(std::size_t n, std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n * p);
    for (double& v : x) v = rng.normal();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.7;
        for (std::size_t j = 0; j < p; ++j) {
            fit += (static_cast<double>(j % 3) - 1.0) * x[j * n + i];
        }
        y[i] = fit + rng.normal();
    }
    return DataMatrix(n, p, std::move(x), std::move(y));
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1e-300});
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

}  // namespace

TEST_CASE("ols_fit on noiseless data has zero residuals") {
    Rng rng(61);
    const std::size_t n = 20, p = 3;
    std::vector<double> x(n * p);
    for (double& v : x) v = rng.normal();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = 2.0 + 1.5 * x[0 * n + i] - 3.0 * x[1 * n + i] + 0.25 * x[2 * n + i];
    }
    const DataMatrix data(n, p, std::move(x), std::move(y));
    const OlsFit fit = ols_fit(data);
    for (double r : fit.residuals) {
        CHECK(std::abs(r) < 1e-10);
    }
    CHECK(fit.sigma2 < 1e-20);
    CHECK(fit.beta[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.beta[2] == doctest::Approx(-3.0).epsilon(1e-10));
}

TEST_CASE("ols_fit matches the normal-equations oracle") {
    const DataMatrix data = regression_data(50, 3, 62);
    const OlsFit fit = ols_fit(data);
    const std::vector<double> expected = oracles::normal_equations_ols(data);
    for (std::size_t j = 0; j < expected.size(); ++j) {
        CHECK(fit.beta[j] == doctest::Approx(expected[j]).epsilon(1e-8));
    }
}

TEST_CASE("ols_fit hat diagonal sums to p + 1 and stays in [0, 1]") {
    const DataMatrix data = regression_data(40, 4, 63);
    const OlsFit fit = ols_fit(data);
    const double trace = std::accumulate(fit.hat_diag.begin(), fit.hat_diag.end(), 0.0);
    CHECK(trace == doctest::Approx(5.0).epsilon(1e-8));
    for (double h : fit.hat_diag) {
        CHECK(h >= -1e-12);
        CHECK(h <= 1.0 + 1e-12);
    }
}

TEST_CASE("ols_fit dimension and rank errors") {
    CHECK_THROWS_AS(ols_fit(oracles::random_data(4, 4, 64)), DimensionError);
    CHECK_THROWS_AS(ols_fit(oracles::random_data(5, 4, 64)), DimensionError);

    // Duplicate column -> rank deficient.
    Rng rng(65);
    const std::size_t n = 10;
    std::vector<double> col(n);
    for (double& v : col) v = rng.normal();
    std::vector<double> x;
    x.insert(x.end(), col.begin(), col.end());
    x.insert(x.end(), col.begin(), col.end());
    std::vector<double> y(n);
    for (double& v : y) v = rng.normal();
    const DataMatrix dup(n, 2, std::move(x), std::move(y));
    CHECK_THROWS_AS(ols_fit(dup), SingularDesign);
}

TEST_CASE("deletion and closed forms agree") {
    Rng rng(66);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 10 + rng.next() % 51;
        const std::size_t p = 1 + rng.next() % 8;
        const DataMatrix data = regression_data(n, p, 6600 + rep);
        const std::vector<double> deletion = cooks_distance_deletion(data);
        const std::vector<double> closed = cooks_distance_hat(ols_fit(data));
        CHECK(max_rel_diff(deletion, closed) < 1e-10);
    }
}

TEST_CASE("zero residual gives exactly zero distance") {
    // Exact-arithmetic fit: x = (-1, 0, 0, 1), y = (0, 1, -1, 0) has
    // beta = (0, 0), residuals (0, -1, 1, 0), h = (3/4, 1/4, 1/4, 3/4),
    // sigma2 = 1. All values are representable, so rows 0 and 3 must come out
    // exactly zero from the closed form.
    OlsFit fit;
    fit.n = 4;
    fit.p = 1;
    fit.beta = {0.0, 0.0};
    fit.residuals = {0.0, -1.0, 1.0, 0.0};
    fit.hat_diag = {0.75, 0.25, 0.25, 0.75};
    fit.sigma2 = 1.0;
    const std::vector<double> d = cooks_distance_hat(fit);
    CHECK(d[0] == 0.0);
    CHECK(d[3] == 0.0);
    CHECK(d[1] > 0.0);

    // The solver reproduces that fit up to roundoff.
    const DataMatrix data = DataMatrix::from_rows({{-1.0}, {0.0}, {0.0}, {1.0}},
                                                  {0.0, 1.0, -1.0, 0.0});
    const OlsFit solved = ols_fit(data);
    CHECK(std::abs(solved.residuals[0]) < 1e-15);
    CHECK(solved.sigma2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("duplicating every row shrinks every distance") {
    const std::size_t n = 12, p = 2;
    const DataMatrix data = regression_data(n, p, 67);
    std::vector<double> x(2 * n * p), y(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            x[j * 2 * n + i] = data.x(i, j);
            x[j * 2 * n + n + i] = data.x(i, j);
        }
        y[i] = data.y()[i];
        y[n + i] = data.y()[i];
    }
    const DataMatrix doubled(2 * n, p, std::move(x), std::move(y));
    const std::vector<double> base = cooks_distance_hat(ols_fit(data));
    const std::vector<double> twice = cooks_distance_hat(ols_fit(doubled));
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(twice[i] < base[i]);
        CHECK(twice[n + i] == doctest::Approx(twice[i]).epsilon(1e-9));
    }
}

TEST_CASE("closed form is monotone in residual and leverage") {
    OlsFit fit;
    fit.n = 3;
    fit.p = 1;
    fit.beta = {0.0, 0.0};
    fit.sigma2 = 1.0;
    auto d_of = [&](double e, double h) {
        fit.residuals = {e, 0.1, 0.1};
        fit.hat_diag = {h, 0.2, 0.2};
        return cooks_distance_hat(fit)[0];
    };
    double prev = d_of(0.0, 0.5);
    for (double e = 0.25; e <= 3.0; e += 0.25) {
        const double cur = d_of(e, 0.5);
        CHECK(cur > prev);
        prev = cur;
    }
    prev = d_of(1.0, 0.01);
    for (double h = 0.1; h < 0.95; h += 0.05) {
        const double cur = d_of(1.0, h);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("hat-matrix invariance under predictor reparameterization") {
    const std::size_t n = 25, p = 3;
    const DataMatrix data = regression_data(n, p, 68);
    const std::vector<double> base = cooks_distance_hat(ols_fit(data));

    // x' = T x + b with invertible T preserves the column span of [1, X].
    const double t[3][3] = {{2.0, 1.0, 0.0}, {0.5, -1.0, 0.25}, {0.0, 3.0, 1.0}};
    const double shift[3] = {1.0, -2.0, 0.5};
    std::vector<double> x(n * p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            double v = shift[a];
            for (std::size_t b = 0; b < p; ++b) {
                v += t[a][b] * data.x(i, b);
            }
            x[a * n + i] = v;
        }
    }
    const DataMatrix mapped(n, p, std::move(x), data.y());
    const std::vector<double> moved = cooks_distance_hat(ols_fit(mapped));
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(moved[i] == doctest::Approx(base[i]).epsilon(1e-8));
    }
}

TEST_CASE("exact leverage and degenerate fits are rejected") {
    OlsFit fit;
    fit.n = 3;
    fit.p = 1;
    fit.beta = {0.0, 0.0};
    fit.residuals = {0.5, -0.5, 0.0};
    fit.hat_diag = {0.5, 0.5, 1.0};
    fit.sigma2 = 0.25;
    CHECK_THROWS_AS(cooks_distance_hat(fit), ExactLeverage);

    fit.hat_diag = {0.5, 0.5, 0.5};
    fit.sigma2 = 0.0;
    CHECK_THROWS_AS(cooks_distance_hat(fit), DegenerateFit);
}
