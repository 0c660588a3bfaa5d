#include "him/report.hpp"

#include <algorithm>

#include "json.hpp"

namespace him {

namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

std::string diagnosis_report_json(const DiagnosisReport& report) {
    ordered_json j;
    j["meta"] = {
        {"dataset", report.dataset_label},
        {"n", report.scores.n},
        {"p", report.scores.p},
        {"estimator", to_string(report.estimator)},
        {"sd_divisor", "n-1"},
        {"statistic", "n^2 * mean squared leave-one-out marginal correlation change"},
        {"pvalue_reference", "chi-square, 1 df, upper tail"},
    };
    j["scores"] = report.scores.d;
    j["statistics"] = report.scores.stat;
    j["pvalues"] = report.pvalues;
    j["flagged"] = report.flagged;
    j["params"] = {
        {"alpha", report.alpha},
        {"estimator", to_string(report.estimator)},
        {"multiple_testing", "benjamini-hochberg step-up"},
    };
    return j.dump(2) + "\n";
}

std::string diagnosis_report_csv(const DiagnosisReport& report) {
    std::string out = "index,d,stat,pvalue,flagged\n";
    char buffer[128];
    for (std::size_t k = 0; k < report.scores.d.size(); ++k) {
        const bool flagged = std::binary_search(report.flagged.begin(),
                                                report.flagged.end(), k);
        std::snprintf(buffer, sizeof(buffer), "%zu,%.17g,%.17g,%.17g,%d\n", k,
                      report.scores.d[k], report.scores.stat[k], report.pvalues[k],
                      flagged ? 1 : 0);
        out += buffer;
    }
    return out;
}

std::string cook_report_json(const std::vector<double>& distances,
                             const std::string& dataset_label) {
    ordered_json j;
    j["meta"] = {
        {"dataset", dataset_label},
        {"n", distances.size()},
        {"statistic", "cooks distance, (p+1) sigma^2 denominator"},
    };
    j["scores"] = distances;
    return j.dump(2) + "\n";
}

std::string cook_report_csv(const std::vector<double>& distances) {
    std::string out = "index,cooks_distance\n";
    char buffer[64];
    for (std::size_t k = 0; k < distances.size(); ++k) {
        std::snprintf(buffer, sizeof(buffer), "%zu,%.17g\n", k, distances[k]);
        out += buffer;
    }
    return out;
}

std::string glm_report_json(const GlmInfluenceScores& scores,
                            std::span<const std::size_t> flagged, std::size_t m,
                            const std::string& dataset_label) {
    ordered_json j;
    j["meta"] = {
        {"dataset", dataset_label},
        {"n", scores.n},
        {"p", scores.p},
        {"statistic", "mean squared marginal logistic coefficient change"},
        {"fit_failures", scores.fit_failures.size()},
    };
    j["scores"] = scores.d;
    j["flagged"] = std::vector<std::size_t>(flagged.begin(), flagged.end());
    j["params"] = {{"m", m}};
    return j.dump(2) + "\n";
}

std::string glm_report_csv(const GlmInfluenceScores& scores,
                           std::span<const std::size_t> flagged) {
    std::string out = "index,d_glm,flagged\n";
    char buffer[64];
    for (std::size_t k = 0; k < scores.d.size(); ++k) {
        const bool hit = std::find(flagged.begin(), flagged.end(), k) != flagged.end();
        std::snprintf(buffer, sizeof(buffer), "%zu,%.17g,%d\n", k, scores.d[k], hit ? 1 : 0);
        out += buffer;
    }
    return out;
}

}  // namespace him
