#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "him/him.hpp"
#include "him/types.hpp"

namespace him {

// Full diagnosis result: scores, their chi-square(1) p-values, and the
// Benjamini-Hochberg rejection set at level alpha (sorted, ascending).
struct DiagnosisReport {
    InfluenceScores scores;
    std::vector<double> pvalues;
    double alpha = 0.05;
    std::vector<std::size_t> flagged;
    Estimator estimator = Estimator::moment;
    std::string dataset_label;
};

// Elementwise chisq1_sf(stat[k]).
std::vector<double> pvalues(const InfluenceScores& scores);

// Classic step-up rule: sort p ascending, find the largest i (1-based) with
// p_(i) <= i * alpha / n, reject those i hypotheses. Returns original
// indices, sorted ascending.
std::vector<std::size_t> bh_select(std::span<const double> pvalues, double alpha);

// him_scores -> pvalues -> bh_select, packaged with provenance.
DiagnosisReport diagnose(const DataMatrix& data, double alpha, Estimator estimator,
                         std::string dataset_label = "");

struct RowRemoval {
    DataMatrix data;
    std::vector<std::size_t> removed;  // original indices, sorted
};

// Drops the flagged rows, preserving survivor order. Requires at least three
// survivors.
RowRemoval remove_rows(const DataMatrix& data, std::span<const std::size_t> flagged);

}  // namespace him
