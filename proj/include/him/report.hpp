#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "him/glm_him.hpp"
#include "him/inference.hpp"

namespace him {

// JSON serialization of a diagnosis. Top-level keys, in order:
// meta, scores, statistics, pvalues, flagged, params. Arrays have length n
// in original row order.
std::string diagnosis_report_json(const DiagnosisReport& report);

// CSV serialization: index,d,stat,pvalue,flagged rows.
std::string diagnosis_report_csv(const DiagnosisReport& report);

std::string cook_report_json(const std::vector<double>& distances,
                             const std::string& dataset_label);
std::string cook_report_csv(const std::vector<double>& distances);

std::string glm_report_json(const GlmInfluenceScores& scores,
                            std::span<const std::size_t> flagged, std::size_t m,
                            const std::string& dataset_label);
std::string glm_report_csv(const GlmInfluenceScores& scores,
                           std::span<const std::size_t> flagged);

}  // namespace him
