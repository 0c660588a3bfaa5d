#include "him/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace him {

std::vector<double> pvalues(const InfluenceScores& scores) {
    std::vector<double> p(scores.stat.size());
    for (std::size_t k = 0; k < scores.stat.size(); ++k) {
        p[k] = chisq1_sf(scores.stat[k]);
    }
    return p;
}

std::vector<std::size_t> bh_select(std::span<const double> pvalues, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("bh_select: alpha must lie strictly inside (0, 1)");
    }
    const std::size_t n = pvalues.size();
    for (double p : pvalues) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InvalidArgument("bh_select: p-values must lie in [0, 1]");
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });

    std::size_t cut = 0;  // number of rejections
    for (std::size_t i = n; i-- > 0;) {
        const double threshold = alpha * static_cast<double>(i + 1) / static_cast<double>(n);
        if (pvalues[order[i]] <= threshold) {
            cut = i + 1;
            break;
        }
    }
    std::vector<std::size_t> flagged(order.begin(), order.begin() + cut);
    std::sort(flagged.begin(), flagged.end());
    return flagged;
}

DiagnosisReport diagnose(const DataMatrix& data, double alpha, Estimator estimator,
                         std::string dataset_label) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("diagnose: alpha must lie strictly inside (0, 1)");
    }
    DiagnosisReport report;
    report.scores = him_scores(data, estimator);
    report.pvalues = pvalues(report.scores);
    report.alpha = alpha;
    report.flagged = bh_select(report.pvalues, alpha);
    report.estimator = estimator;
    report.dataset_label = std::move(dataset_label);
    return report;
}

RowRemoval remove_rows(const DataMatrix& data, std::span<const std::size_t> flagged) {
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    std::set<std::size_t> drop;
    for (std::size_t idx : flagged) {
        if (idx >= n) {
            throw InvalidArgument("remove_rows: flagged index " + std::to_string(idx) +
                                  " out of range for n = " + std::to_string(n));
        }
        drop.insert(idx);
    }
    const std::size_t survivors = n - drop.size();
    if (survivors < 3) {
        throw InsufficientData("remove_rows: fewer than 3 rows would remain");
    }
    std::vector<double> x(survivors * p);
    std::vector<double> y;
    y.reserve(survivors);
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (drop.count(i)) continue;
        for (std::size_t j = 0; j < p; ++j) {
            x[j * survivors + r] = data.x(i, j);
        }
        y.push_back(data.y()[i]);
        ++r;
    }
    RowRemoval out{DataMatrix(survivors, p, std::move(x), std::move(y), data.column_names()),
                   std::vector<std::size_t>(drop.begin(), drop.end())};
    return out;
}

}  // namespace him
