#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "him/rng.hpp"
#include "him/types.hpp"

namespace him {

enum class Model { m1, m2, m3, logistic };
enum class SSet { s1, s2, s3 };
enum class Pipeline { him, sis, sis_him, lasso, lasso_him, glm_him };

std::string to_string(Model model);
std::string to_string(SSet s);
std::string to_string(Pipeline pipeline);
Model parse_model(const std::string& text);
SSet parse_s_set(const std::string& text);
Pipeline parse_pipeline(const std::string& text);

// Experiment description. The linear models draw predictors from a
// stationary AR(1) Gaussian process with lag-one correlation 0.5, unit noise,
// and contaminate the first n_infl rows with strength kappa; the logistic
// model perturbs the coefficient tail of those rows instead.
struct SimulationSpec {
    Model model = Model::m1;
    std::size_t n = 100;
    std::size_t p = 1000;
    std::size_t n_infl = 10;
    double kappa = 0.0;
    SSet s_set = SSet::s1;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::size_t replications = 200;
    // Plug-in estimator for the influence scores. Robust by default: moment
    // scale estimates absorb the very contamination the diagnosis is after.
    Estimator estimator = Estimator::robust;
    std::size_t sis_d = 0;       // 0: floor(n / log n)
    std::size_t glm_flag_m = 0;  // 0: n_infl
    std::size_t cv_folds = 10;
    std::size_t n_lambda = 100;
};

struct GeneratedInstance {
    DataMatrix data;
    std::vector<double> beta_true;
    std::vector<std::size_t> true_influential;  // always the first n_infl rows
    Model model = Model::m1;
    double kappa = 0.0;
};

// Stationary AR(1) row: X_1 ~ N(0,1), X_j = rho X_{j-1} + sqrt(1-rho^2) Z_j,
// giving cov(X_j, X_j') = rho^{|j - j'|} exactly, in O(p).
std::vector<double> sample_ar1_row(std::size_t p, double rho, Rng& rng);

// Response perturbation: rows i < n_infl get Y_i = X_i'beta + kappa Z_i + eps_i
// with Z_i the sum of X_i over the null coordinates.
GeneratedInstance gen_model1(const SimulationSpec& spec, Rng& rng);
// Predictor perturbation: stored X gains a 30*kappa shift on the columns in S
// for rows i < n_infl; the response stays that of the unshifted predictors.
GeneratedInstance gen_model2(const SimulationSpec& spec, Rng& rng);
// Both perturbations combined.
GeneratedInstance gen_model3(const SimulationSpec& spec, Rng& rng);
// Binary response P(Y=1|X) = sigmoid(2 + X'beta); rows i < n_infl use the
// coefficient vector with -kappa in the trailing p/2 positions.
GeneratedInstance gen_logistic(const SimulationSpec& spec, Rng& rng);

GeneratedInstance generate(const SimulationSpec& spec, Rng& rng);

// Nonzero support of the experiment's true coefficient vector.
std::vector<std::size_t> true_support(const SimulationSpec& spec);

struct MetricRow {
    Model model = Model::m1;
    double kappa = 0.0;
    std::optional<SSet> s_set;
    Pipeline pipeline = Pipeline::him;
    std::string metric;
    double mean = 0.0;
    double mc_se = 0.0;
    std::size_t n_reps = 0;
    std::size_t n_failures = 0;
};

struct ReplicationTable {
    std::vector<MetricRow> rows;
};

// Runs `spec.replications` independent replications per kappa value and
// aggregates pipeline metrics (mean and Monte Carlo standard error).
// Replication r draws from substreams derived from (spec.seed, r) only, so
// the same rows come out for any thread count and the kappa grid shares
// random numbers. A replication whose pipeline throws counts as a failure
// for its kappa and is excluded from the means.
ReplicationTable run_replications(const SimulationSpec& spec, Pipeline pipeline,
                                  std::span<const double> kappas,
                                  unsigned threads = 1);
ReplicationTable run_replications(const SimulationSpec& spec, Pipeline pipeline,
                                  unsigned threads = 1);

std::string to_csv(const ReplicationTable& table);
std::string format_table(const ReplicationTable& table);

namespace detail {

// Classifier used for the logistic experiments: predictors are ranked by
// marginal deviance reduction on the training data, the model size along
// that nesting (up to d) is chosen by AIC, and a damped IRLS logistic fit on
// the chosen predictors labels the held-out rows (x_test column-major,
// n_test x p). Returns the misclassification rate against y_test. Training
// error is uninformative here (a flexible fit separates ~100 points), and
// large screened fits drown the boundary in overfit slopes, which is why the
// size is selected rather than fixed.
double logistic_misclassification(const DataMatrix& train, std::size_t d,
                                  std::span<const double> x_test,
                                  std::span<const double> y_test,
                                  std::size_t n_test);

}  // namespace detail

}  // namespace him
