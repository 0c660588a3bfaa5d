#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "him/him.hpp"
#include "oracles.hpp"

using namespace him;

namespace {

DataMatrix delete_row(const DataMatrix& data, std::size_t k) {
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    std::vector<double> x((n - 1) * p);
    std::vector<double> y;
    y.reserve(n - 1);
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        for (std::size_t j = 0; j < p; ++j) {
            x[j * (n - 1) + r] = data.x(i, j);
        }
        y.push_back(data.y()[i]);
        ++r;
    }
    return DataMatrix(n - 1, p, std::move(x), std::move(y));
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

TEST_CASE("loo_correlation equals (n-2)/(n-1) when y repeats a column") {
    Rng rng(41);
    std::vector<double> col(4);
    for (double& v : col) v = rng.normal();
    std::vector<double> other(4);
    for (double& v : other) v = rng.normal();
    std::vector<double> storage = col;
    storage.insert(storage.end(), other.begin(), other.end());
    const DataMatrix data(4, 2, storage, col);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto rho = loo_correlation(data, k, Estimator::moment);
        CHECK(rho[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("loo_correlation matches the row-deletion route") {
    const DataMatrix data = oracles::random_data(10, 5, 42);
    for (std::size_t k = 0; k < 10; ++k) {
        for (Estimator est : {Estimator::moment, Estimator::robust}) {
            const auto fast = loo_correlation(data, k, est);
            const auto direct = marginal_correlations(delete_row(data, k), est);
            CHECK(max_rel_diff(fast, direct) < 1e-12);
        }
    }
}

TEST_CASE("loo_correlation rejects an out-of-range row") {
    const DataMatrix data = oracles::random_data(6, 2, 43);
    CHECK_THROWS_AS(loo_correlation(data, 6, Estimator::moment), InvalidArgument);
}

TEST_CASE("him fast path agrees with the naive oracle") {
    const DataMatrix small = oracles::random_data(6, 4, 44);
    const InfluenceScores naive = him_scores_naive(small, Estimator::moment);
    const InfluenceScores fast = him_scores(small, Estimator::moment);
    CHECK(max_rel_diff(naive.d, fast.d) < 1e-10);
    for (double v : naive.d) CHECK(v >= 0.0);

    Rng rng(45);
    for (int rep = 0; rep < 12; ++rep) {
        const std::size_t n = 5 + rng.next() % 30;
        const std::size_t p = 1 + rng.next() % 40;
        const DataMatrix data = oracles::random_data(n, p, 1000 + rep);
        const InfluenceScores a = him_scores_naive(data, Estimator::moment);
        const InfluenceScores b = him_scores(data, Estimator::moment);
        CHECK(max_rel_diff(a.d, b.d) < 1e-10);
    }
}

TEST_CASE("him stat field is exactly n^2 d") {
    const DataMatrix data = oracles::random_data(12, 7, 46);
    const InfluenceScores scores = him_scores(data, Estimator::moment);
    const double n2 = 144.0;
    for (std::size_t k = 0; k < scores.d.size(); ++k) {
        CHECK(scores.stat[k] == n2 * scores.d[k]);
    }
}

TEST_CASE("him robust scores agree between fast and naive paths") {
    const DataMatrix data = oracles::random_data(9, 3, 47);
    const InfluenceScores a = him_scores(data, Estimator::robust);
    const InfluenceScores b = him_scores_naive(data, Estimator::robust);
    CHECK(max_rel_diff(a.d, b.d) < 1e-12);
}

TEST_CASE("contaminated rows do not mask themselves under the robust estimator") {
    // One response outlier: with robust plug-ins its statistic dwarfs the
    // rest; with moment plug-ins the inflated scale estimate absorbs much of
    // it.
    const std::size_t n = 40, p = 30;
    Rng rng(470);
    std::vector<double> x(n * p), y(n);
    for (double& v : x) v = rng.normal();
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.normal();
    y[7] = 60.0;
    const DataMatrix data(n, p, std::move(x), std::move(y));
    const InfluenceScores robust = him_scores(data, Estimator::robust);
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (robust.stat[k] > best) {
            best = robust.stat[k];
            arg = k;
        }
    }
    CHECK(arg == 7);
    CHECK(best > 100.0);
    const InfluenceScores moment = him_scores(data, Estimator::moment);
    CHECK(moment.stat[7] < 0.2 * robust.stat[7]);
}

TEST_CASE("permuting rows permutes scores") {
    const std::size_t n = 15, p = 6;
    const DataMatrix data = oracles::random_data(n, p, 48);
    const InfluenceScores base = him_scores(data, Estimator::moment);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(49);
    for (std::size_t i = n; i-- > 1;) {
        std::swap(perm[i], perm[rng.next() % (i + 1)]);
    }
    std::vector<double> x(n * p), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            x[j * n + perm[i]] = data.x(i, j);
        }
        y[perm[i]] = data.y()[i];
    }
    const DataMatrix shuffled(n, p, std::move(x), std::move(y));
    const InfluenceScores moved = him_scores(shuffled, Estimator::moment);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(moved.d[perm[i]] ==
              doctest::Approx(base.d[i]).epsilon(1e-14));
    }
}

TEST_CASE("scores are invariant under per-column affine maps") {
    const std::size_t n = 20, p = 5;
    const DataMatrix data = oracles::random_data(n, p, 50);
    const InfluenceScores base = him_scores(data, Estimator::moment);

    std::vector<double> x = data.x_data();
    for (std::size_t i = 0; i < n; ++i) {
        x[2 * n + i] = -7.0 * data.x(i, 2) + 11.0;
    }
    std::vector<double> y = data.y();
    for (double& v : y) v = 0.5 * v - 2.0;
    const DataMatrix mapped(n, p, std::move(x), std::move(y));
    const InfluenceScores moved = him_scores(mapped, Estimator::moment);
    CHECK(max_rel_diff(base.d, moved.d) < 1e-12);
}

TEST_CASE("b decomposition identity under the known-moment convention") {
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 20, p = 30;
        const DataMatrix z = oracles::random_data(n, p, 6000 + rep);
        // Direct evaluation with rho = S_j/n and rho^(k) = (S_j - Y_k X_kj)/(n-1).
        std::vector<double> s(p, 0.0);
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                s[j] += z.y()[i] * z.x(i, j);
            }
        }
        for (std::size_t k = 0; k < n; k += 7) {
            double direct = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double rho = s[j] / static_cast<double>(n);
                const double rho_k =
                    (s[j] - z.y()[k] * z.x(k, j)) / static_cast<double>(n - 1);
                direct += (rho - rho_k) * (rho - rho_k);
            }
            direct /= static_cast<double>(p);
            const BDecomposition b = b_decomposition(z, k);
            CHECK(b.total() == doctest::Approx(direct).epsilon(1e-10));
        }
    }
}

TEST_CASE("b decomposition terms vanish for an all-zero response") {
    Rng rng(51);
    const std::size_t n = 8, p = 3;
    std::vector<double> x(n * p);
    for (double& v : x) v = rng.normal();
    const std::vector<double> y(n, 0.0);
    const BDecomposition b = b_decomposition(n, p, x, y, 2);
    CHECK(b.b1 == 0.0);
    CHECK(b.b2 == 0.0);
    CHECK(b.b3 == 0.0);
    CHECK(b.b4 == 0.0);
}

TEST_CASE("b2 matches its standalone closed form") {
    const std::size_t n = 12, p = 9;
    const DataMatrix z = oracles::random_data(n, p, 52);
    const std::size_t k = 5;
    const BDecomposition b = b_decomposition(z, k);
    double norm2 = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        norm2 += z.x(k, j) * z.x(k, j);
    }
    const double nd = static_cast<double>(n);
    const double expected = (nd - 2.0) / (static_cast<double>(p) * nd * (nd - 1.0) * (nd - 1.0)) *
                            z.y()[k] * z.y()[k] * norm2;
    CHECK(b.b2 == doctest::Approx(expected).epsilon(1e-12));
}
