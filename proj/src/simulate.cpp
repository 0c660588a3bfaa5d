#include "him/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "him/downstream.hpp"
#include "him/glm_him.hpp"
#include "him/inference.hpp"
#include "him/stats_core.hpp"

namespace him {

std::string to_string(Model model) {
    switch (model) {
        case Model::m1: return "m1";
        case Model::m2: return "m2";
        case Model::m3: return "m3";
        case Model::logistic: return "logistic";
    }
    return "?";
}

std::string to_string(SSet s) {
    switch (s) {
        case SSet::s1: return "s1";
        case SSet::s2: return "s2";
        case SSet::s3: return "s3";
    }
    return "?";
}

std::string to_string(Pipeline pipeline) {
    switch (pipeline) {
        case Pipeline::him: return "him";
        case Pipeline::sis: return "sis";
        case Pipeline::sis_him: return "sis+him";
        case Pipeline::lasso: return "lasso";
        case Pipeline::lasso_him: return "lasso+him";
        case Pipeline::glm_him: return "glm-him";
    }
    return "?";
}

Model parse_model(const std::string& text) {
    if (text == "m1") return Model::m1;
    if (text == "m2") return Model::m2;
    if (text == "m3") return Model::m3;
    if (text == "logistic") return Model::logistic;
    throw ConfigError("unknown model: " + text);
}

SSet parse_s_set(const std::string& text) {
    if (text == "s1") return SSet::s1;
    if (text == "s2") return SSet::s2;
    if (text == "s3") return SSet::s3;
    throw ConfigError("unknown s-set: " + text);
}

Pipeline parse_pipeline(const std::string& text) {
    if (text == "him") return Pipeline::him;
    if (text == "sis") return Pipeline::sis;
    if (text == "sis+him") return Pipeline::sis_him;
    if (text == "lasso") return Pipeline::lasso;
    if (text == "lasso+him") return Pipeline::lasso_him;
    if (text == "glm-him") return Pipeline::glm_him;
    throw ConfigError("unknown pipeline: " + text);
}

namespace {

void validate_spec(const SimulationSpec& spec) {
    if (spec.n < 3 || spec.p < 1) {
        throw InvalidArgument("simulation: need n >= 3 and p >= 1");
    }
    if (spec.n_infl >= spec.n) {
        throw InvalidArgument("simulation: n_infl must be smaller than n");
    }
    if (spec.kappa < 0.0) {
        throw InvalidArgument("simulation: kappa must be nonnegative");
    }
    if (spec.model != Model::logistic && spec.p < 5) {
        throw InvalidArgument("simulation: linear models need p >= 5");
    }
    if (spec.model == Model::logistic && (spec.p < 2 || spec.p % 2 != 0)) {
        throw InvalidArgument("simulation: logistic model needs even p >= 2");
    }
}

// Columns shifted by the predictor perturbation, half-open [first, last).
std::pair<std::size_t, std::size_t> s_range(SSet s, std::size_t p) {
    switch (s) {
        case SSet::s1: return {0, std::min<std::size_t>(100, p)};
        case SSet::s2: return {p > 101 ? p - 101 : 0, p};
        case SSet::s3: return {0, p};
    }
    return {0, p};
}

std::vector<double> linear_beta(std::size_t p) {
    std::vector<double> beta(p, 0.0);
    beta[0] = 3.0;
    beta[1] = 1.5;
    beta[4] = 2.0;
    return beta;
}

struct LinearDraws {
    std::vector<double> x;  // column-major n x p
    std::vector<double> y;  // clean response X beta + eps
    std::vector<double> z;  // per-row sum of X over the null coordinates
};

// Shared generator core for the three linear models: the draw order (X row
// by row, then the noise vector) never depends on kappa or the model, so a
// fixed substream yields common random numbers across the whole kappa grid.
LinearDraws draw_linear(const SimulationSpec& spec, Rng& rng) {
    const std::size_t n = spec.n;
    const std::size_t p = spec.p;
    const std::vector<double> beta = linear_beta(p);
    LinearDraws out;
    out.x.resize(n * p);
    out.y.assign(n, 0.0);
    out.z.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> row = sample_ar1_row(p, 0.5, rng);
        double fit = 0.0;
        double z = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            out.x[j * n + i] = row[j];
            fit += beta[j] * row[j];
            if (j != 0 && j != 1 && j != 4) {
                z += row[j];
            }
        }
        out.y[i] = fit;
        out.z[i] = z;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.y[i] += rng.normal();
    }
    return out;
}

GeneratedInstance finish_linear(const SimulationSpec& spec, LinearDraws draws,
                                bool perturb_response, bool perturb_predictors) {
    const std::size_t n = spec.n;
    const std::size_t p = spec.p;
    if (perturb_response) {
        for (std::size_t i = 0; i < spec.n_infl; ++i) {
            draws.y[i] += spec.kappa * draws.z[i];
        }
    }
    if (perturb_predictors) {
        const auto [first, last] = s_range(spec.s_set, p);
        const double shift = 30.0 * spec.kappa;
        for (std::size_t j = first; j < last; ++j) {
            for (std::size_t i = 0; i < spec.n_infl; ++i) {
                draws.x[j * n + i] += shift;
            }
        }
    }
    std::vector<std::size_t> influential(spec.n_infl);
    std::iota(influential.begin(), influential.end(), 0);
    GeneratedInstance out{DataMatrix(n, p, std::move(draws.x), std::move(draws.y)),
                          linear_beta(p), std::move(influential), spec.model, spec.kappa};
    return out;
}

}  // namespace

std::vector<double> sample_ar1_row(std::size_t p, double rho, Rng& rng) {
    if (!(rho > -1.0 && rho < 1.0)) {
        throw InvalidArgument("sample_ar1_row: rho must lie in (-1, 1)");
    }
    std::vector<double> row(p);
    const double innovation = std::sqrt(1.0 - rho * rho);
    double prev = rng.normal();
    row[0] = prev;
    for (std::size_t j = 1; j < p; ++j) {
        prev = rho * prev + innovation * rng.normal();
        row[j] = prev;
    }
    return row;
}

GeneratedInstance gen_model1(const SimulationSpec& spec, Rng& rng) {
    validate_spec(spec);
    return finish_linear(spec, draw_linear(spec, rng), true, false);
}

GeneratedInstance gen_model2(const SimulationSpec& spec, Rng& rng) {
    validate_spec(spec);
    return finish_linear(spec, draw_linear(spec, rng), false, true);
}

GeneratedInstance gen_model3(const SimulationSpec& spec, Rng& rng) {
    validate_spec(spec);
    return finish_linear(spec, draw_linear(spec, rng), true, true);
}

GeneratedInstance gen_logistic(const SimulationSpec& spec, Rng& rng) {
    validate_spec(spec);
    const std::size_t n = spec.n;
    const std::size_t p = spec.p;
    std::vector<double> beta_true(p, 0.0);
    beta_true[0] = 5.0;
    beta_true[1] = 5.0;

    std::vector<double> x(n * p);
    std::vector<double> theta(n, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> row = sample_ar1_row(p, 0.5, rng);
        double fit = beta_true[0] * row[0] + beta_true[1] * row[1];
        if (i < spec.n_infl) {
            double tail = 0.0;
            for (std::size_t j = p / 2; j < p; ++j) {
                tail += row[j];
            }
            fit -= spec.kappa * tail;
        }
        theta[i] += fit;
        for (std::size_t j = 0; j < p; ++j) {
            x[j * n + i] = row[j];
        }
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        y[i] = u < 1.0 / (1.0 + std::exp(-theta[i])) ? 1.0 : 0.0;
    }
    std::vector<std::size_t> influential(spec.n_infl);
    std::iota(influential.begin(), influential.end(), 0);
    return GeneratedInstance{DataMatrix(n, p, std::move(x), std::move(y)),
                             std::move(beta_true), std::move(influential),
                             Model::logistic, spec.kappa};
}

GeneratedInstance generate(const SimulationSpec& spec, Rng& rng) {
    switch (spec.model) {
        case Model::m1: return gen_model1(spec, rng);
        case Model::m2: return gen_model2(spec, rng);
        case Model::m3: return gen_model3(spec, rng);
        case Model::logistic: return gen_logistic(spec, rng);
    }
    throw InvalidArgument("generate: unknown model");
}

std::vector<std::size_t> true_support(const SimulationSpec& spec) {
    if (spec.model == Model::logistic) {
        return {0, 1};
    }
    return {0, 1, 4};
}

namespace detail {

namespace {

// Solve the symmetric positive definite system by Cholesky; adds a tiny
// ridge and retries when the factorization stalls.
bool solve_spd(std::vector<double>& a, std::vector<double>& b, std::size_t d) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::vector<double> chol = a;
        bool ok = true;
        for (std::size_t i = 0; i < d && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = chol[i * d + j];
                for (std::size_t k = 0; k < j; ++k) {
                    sum -= chol[i * d + k] * chol[j * d + k];
                }
                if (i == j) {
                    if (!(sum > 0.0)) {
                        ok = false;
                        break;
                    }
                    chol[i * d + i] = std::sqrt(sum);
                } else {
                    chol[i * d + j] = sum / chol[j * d + j];
                }
            }
        }
        if (ok) {
            std::vector<double> z(d);
            for (std::size_t i = 0; i < d; ++i) {
                double sum = b[i];
                for (std::size_t k = 0; k < i; ++k) {
                    sum -= chol[i * d + k] * z[k];
                }
                z[i] = sum / chol[i * d + i];
            }
            for (std::size_t i = d; i-- > 0;) {
                double sum = z[i];
                for (std::size_t k = i + 1; k < d; ++k) {
                    sum -= chol[k * d + i] * b[k];
                }
                b[i] = sum / chol[i * d + i];
            }
            return true;
        }
        double max_diag = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            max_diag = std::max(max_diag, a[i * d + i]);
        }
        const double ridge = std::max(1e-10, 1e-8 * max_diag);
        for (std::size_t i = 0; i < d; ++i) {
            a[i * d + i] += ridge;
        }
    }
    return false;
}

double mean_nll(const std::vector<double>& eta, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double t = eta[i];
        const double softplus = t > 35.0 ? t : (t < -35.0 ? std::exp(t) : std::log1p(std::exp(t)));
        acc += softplus - y[i] * t;
    }
    return acc / static_cast<double>(eta.size());
}

}  // namespace

double logistic_misclassification(const DataMatrix& data, std::size_t d,
                                  std::span<const double> x_test,
                                  std::span<const double> y_test,
                                  std::size_t n_test) {
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    if (x_test.size() != n_test * p || y_test.size() != n_test) {
        throw InvalidArgument("logistic_misclassification: test storage mismatch");
    }
    d = std::min(d, p);
    if (d + 1 >= n) {
        d = n - 2;
    }
    if (d < 1) {
        throw InvalidArgument("logistic_misclassification: screening size too small");
    }

    // Rank predictors by marginal deviance reduction.
    const double ybar =
        std::accumulate(data.y().begin(), data.y().end(), 0.0) / static_cast<double>(n);
    const double null_nll = ybar <= 0.0 || ybar >= 1.0
                                ? 0.0
                                : -(ybar * std::log(ybar) + (1.0 - ybar) * std::log1p(-ybar));
    std::vector<double> gain(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        const LogisticFit f = fit_logistic_2p(data.column(j), data.y(), 0.0, 0.0, nullptr);
        gain[j] = null_nll - logistic_nll(data.column(j), data.y(), f.beta0, f.beta1);
    }
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (gain[a] != gain[b]) return gain[a] > gain[b];
        return a < b;
    });
    order.resize(d);

    // Standardized screened columns, kept for prediction too.
    std::vector<double> feat_mean(d, 0.0), feat_scale(d, 1.0);
    std::vector<double> z(n * d);
    for (std::size_t c = 0; c < d; ++c) {
        const auto col = data.column(order[c]);
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : col) ss += (v - mean) * (v - mean);
        const double scale = std::sqrt(ss / static_cast<double>(n));
        feat_mean[c] = mean;
        feat_scale[c] = scale > 0.0 ? scale : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[c * n + i] = (col[i] - feat_mean[c]) / feat_scale[c];
        }
    }

    // Damped IRLS on intercept + the first m ranked columns. A hair of ridge
    // keeps the Newton system solvable under separation.
    const double jitter = 1e-8;
    auto fit_model = [&](std::size_t m, std::vector<double> beta, double* out_nll) {
        const std::size_t dim = m + 1;
        beta.resize(dim, 0.0);
        std::vector<double> eta(n, 0.0);
        auto linear = [&](const std::vector<double>& b, std::vector<double>& e) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = b[0];
                for (std::size_t c = 0; c < m; ++c) {
                    acc += b[c + 1] * z[c * n + i];
                }
                e[i] = acc;
            }
        };
        linear(beta, eta);
        double nll = mean_nll(eta, data.y());
        for (std::size_t iter = 0; iter < 50; ++iter) {
            std::vector<double> grad(dim, 0.0);
            std::vector<double> hess(dim * dim, 0.0);
            std::vector<double> feat(dim, 1.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double mu = 1.0 / (1.0 + std::exp(-eta[i]));
                const double r = (mu - data.y()[i]) / static_cast<double>(n);
                const double w = mu * (1.0 - mu) / static_cast<double>(n);
                for (std::size_t c = 0; c < m; ++c) {
                    feat[c + 1] = z[c * n + i];
                }
                for (std::size_t a = 0; a < dim; ++a) {
                    grad[a] += r * feat[a];
                    for (std::size_t b = 0; b <= a; ++b) {
                        hess[a * dim + b] += w * feat[a] * feat[b];
                    }
                }
            }
            for (std::size_t a = 1; a < dim; ++a) {
                grad[a] += jitter * beta[a];
                hess[a * dim + a] += jitter;
            }
            for (std::size_t a = 0; a < dim; ++a) {
                for (std::size_t b = a + 1; b < dim; ++b) {
                    hess[a * dim + b] = hess[b * dim + a];
                }
            }
            double gnorm = 0.0;
            for (double g : grad) {
                gnorm += g * g;
            }
            if (std::sqrt(gnorm) <= 1e-10) {
                break;
            }
            std::vector<double> step = grad;
            if (!solve_spd(hess, step, dim)) {
                break;
            }
            double scale = 1.0;
            std::vector<double> next(dim);
            std::vector<double> next_eta(n);
            double next_nll = 0.0;
            std::size_t halvings = 0;
            for (;; ++halvings) {
                for (std::size_t a = 0; a < dim; ++a) {
                    next[a] = beta[a] - scale * step[a];
                }
                linear(next, next_eta);
                next_nll = mean_nll(next_eta, data.y());
                if (next_nll <= nll || halvings >= 30) {
                    break;
                }
                scale *= 0.5;
            }
            double move = 0.0;
            for (std::size_t a = 0; a < dim; ++a) {
                move = std::max(move, std::abs(next[a] - beta[a]));
            }
            beta = next;
            eta = next_eta;
            nll = next_nll;
            if (move <= 1e-9) {
                break;
            }
        }
        *out_nll = nll;
        return beta;
    };

    // Model size by AIC along the deviance-ranked nesting, warm-starting
    // each size from the previous fit.
    std::vector<double> best_beta{ybar <= 0.0 || ybar >= 1.0
                                      ? 0.0
                                      : std::log(ybar / (1.0 - ybar))};
    double best_aic = 2.0 * static_cast<double>(n) * null_nll + 2.0;
    std::size_t best_m = 0;
    std::vector<double> warm;
    for (std::size_t m = 1; m <= d; ++m) {
        double nll = 0.0;
        warm = fit_model(m, warm, &nll);
        const double aic = 2.0 * static_cast<double>(n) * nll +
                           2.0 * static_cast<double>(m + 1);
        if (aic < best_aic) {
            best_aic = aic;
            best_m = m;
            best_beta = warm;
        }
    }

    std::size_t wrong = 0;
    for (std::size_t i = 0; i < n_test; ++i) {
        double e = best_beta[0];
        for (std::size_t c = 0; c < best_m; ++c) {
            e += best_beta[c + 1] * (x_test[order[c] * n_test + i] - feat_mean[c]) /
                 feat_scale[c];
        }
        const double predicted = e > 0.0 ? 1.0 : 0.0;
        if (predicted != y_test[i]) {
            ++wrong;
        }
    }
    return static_cast<double>(wrong) / static_cast<double>(n_test);
}

}  // namespace detail

namespace {

std::size_t default_sis_d(const SimulationSpec& spec) {
    if (spec.sis_d > 0) {
        return std::min(spec.sis_d, spec.p);
    }
    const std::size_t d = static_cast<std::size_t>(
        std::floor(static_cast<double>(spec.n) / std::log(static_cast<double>(spec.n))));
    return std::clamp<std::size_t>(d, 1, spec.p);
}

std::vector<std::size_t> nonzero_support(std::span<const double> beta) {
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) {
            support.push_back(j);
        }
    }
    return support;
}

using MetricValues = std::vector<std::pair<std::string, double>>;

MetricValues run_one(const SimulationSpec& spec, Pipeline pipeline, std::size_t rep) {
    SimulationSpec local = spec;
    Rng gen_rng(Rng::derive(spec.seed, rep, 0));
    const std::uint64_t cv_seed = Rng::derive(spec.seed, rep, 1);
    const GeneratedInstance instance = generate(local, gen_rng);
    const std::vector<std::size_t> support = true_support(spec);
    const std::size_t d = default_sis_d(spec);
    const std::size_t m = spec.glm_flag_m > 0 ? spec.glm_flag_m : spec.n_infl;
    const bool contaminated = spec.kappa > 0.0;

    MetricValues values;
    switch (pipeline) {
        case Pipeline::him: {
            const DiagnosisReport report =
                diagnose(instance.data, spec.alpha, spec.estimator);
            if (contaminated) {
                const PowerFdr pf = eval_power_fdr(report.flagged, instance.true_influential);
                values.emplace_back("power", pf.power);
                values.emplace_back("fdr", pf.fdr);
            }
            values.emplace_back("flagged", static_cast<double>(report.flagged.size()));
            break;
        }
        case Pipeline::sis: {
            const ScreeningResult screen = sis_screen(instance.data, d);
            values.emplace_back("cp", eval_cp(screen.selected, support));
            break;
        }
        case Pipeline::sis_him: {
            const DiagnosisReport report =
                diagnose(instance.data, spec.alpha, spec.estimator);
            const RowRemoval reduced = remove_rows(instance.data, report.flagged);
            const ScreeningResult screen = sis_screen(reduced.data, d);
            values.emplace_back("cp", eval_cp(screen.selected, support));
            break;
        }
        case Pipeline::lasso: {
            const LassoFit fit =
                lasso_path_cv(instance.data, spec.n_lambda, spec.cv_folds, cv_seed);
            values.emplace_back("err", eval_err(fit.beta, instance.beta_true));
            values.emplace_back("fpr",
                                eval_fpr(nonzero_support(fit.beta), support, spec.p));
            break;
        }
        case Pipeline::lasso_him: {
            const DiagnosisReport report =
                diagnose(instance.data, spec.alpha, spec.estimator);
            const RowRemoval reduced = remove_rows(instance.data, report.flagged);
            const LassoFit fit =
                lasso_path_cv(reduced.data, spec.n_lambda, spec.cv_folds, cv_seed);
            values.emplace_back("err", eval_err(fit.beta, instance.beta_true));
            values.emplace_back("fpr",
                                eval_fpr(nonzero_support(fit.beta), support, spec.p));
            if (contaminated) {
                const PowerFdr pf = eval_power_fdr(report.flagged, instance.true_influential);
                values.emplace_back("power", pf.power);
            }
            break;
        }
        case Pipeline::glm_him: {
            const GlmInfluenceScores scores = glm_him_scores(instance.data);
            const std::vector<std::size_t> flagged = rank_influential(scores, m);
            if (contaminated) {
                const PowerFdr pf = eval_power_fdr(flagged, instance.true_influential);
                values.emplace_back("power", pf.power);
            }
            // Held-out predictors from the clean law (stream 2, so the same
            // test set serves every kappa), labeled by the true decision
            // boundary: the metric is boundary recovery, with no noise floor.
            const std::size_t n_test = 1000;
            Rng test_rng(Rng::derive(spec.seed, rep, 2));
            std::vector<double> x_test(n_test * spec.p), y_test(n_test);
            for (std::size_t i = 0; i < n_test; ++i) {
                const std::vector<double> row = sample_ar1_row(spec.p, 0.5, test_rng);
                y_test[i] = 2.0 + 5.0 * row[0] + 5.0 * row[1] > 0.0 ? 1.0 : 0.0;
                for (std::size_t j = 0; j < spec.p; ++j) {
                    x_test[j * n_test + i] = row[j];
                }
            }
            values.emplace_back("e_full",
                                detail::logistic_misclassification(
                                    instance.data, d, x_test, y_test, n_test));
            const RowRemoval reduced = remove_rows(instance.data, flagged);
            values.emplace_back("e_redu",
                                detail::logistic_misclassification(
                                    reduced.data, d, x_test, y_test, n_test));
            break;
        }
    }
    return values;
}

}  // namespace

ReplicationTable run_replications(const SimulationSpec& spec, Pipeline pipeline,
                                  std::span<const double> kappas, unsigned threads) {
    if (spec.replications < 1) {
        throw InvalidArgument("run_replications: need at least one replication");
    }
    if (kappas.empty()) {
        throw InvalidArgument("run_replications: empty kappa grid");
    }
    const std::size_t reps = spec.replications;
    const std::size_t n_kappa = kappas.size();

    // result[kappa_index][rep]: metric values, or empty marker on failure.
    std::vector<std::vector<std::optional<MetricValues>>> results(
        n_kappa, std::vector<std::optional<MetricValues>>(reps));

    auto worker = [&](unsigned worker_id, unsigned n_workers) {
        for (std::size_t r = worker_id; r < reps; r += n_workers) {
            for (std::size_t ki = 0; ki < n_kappa; ++ki) {
                SimulationSpec local = spec;
                local.kappa = kappas[ki];
                try {
                    results[ki][r] = run_one(local, pipeline, r);
                } catch (const Error&) {
                    results[ki][r] = std::nullopt;
                }
            }
        }
    };

    const unsigned n_workers = std::max(1u, threads);
    if (n_workers == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned t = 0; t < n_workers; ++t) {
            pool.emplace_back(worker, t, n_workers);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    const bool uses_s_set = spec.model == Model::m2 || spec.model == Model::m3;
    ReplicationTable table;
    for (std::size_t ki = 0; ki < n_kappa; ++ki) {
        // Metric order: first appearance across replications, in rep order.
        std::vector<std::string> metric_order;
        for (const auto& rep_values : results[ki]) {
            if (!rep_values) continue;
            for (const auto& [name, value] : *rep_values) {
                if (std::find(metric_order.begin(), metric_order.end(), name) ==
                    metric_order.end()) {
                    metric_order.push_back(name);
                }
            }
        }
        std::size_t failures = 0;
        for (const auto& rep_values : results[ki]) {
            if (!rep_values) ++failures;
        }
        for (const std::string& name : metric_order) {
            std::vector<double> samples;
            samples.reserve(reps);
            for (const auto& rep_values : results[ki]) {
                if (!rep_values) continue;
                for (const auto& [metric, value] : *rep_values) {
                    if (metric == name) {
                        samples.push_back(value);
                        break;
                    }
                }
            }
            MetricRow row;
            row.model = spec.model;
            row.kappa = kappas[ki];
            if (uses_s_set) {
                row.s_set = spec.s_set;
            }
            row.pipeline = pipeline;
            row.metric = name;
            row.n_reps = samples.size();
            row.n_failures = failures;
            if (!samples.empty()) {
                double mean = 0.0;
                for (double v : samples) {
                    mean += v;
                }
                mean /= static_cast<double>(samples.size());
                double var = 0.0;
                for (double v : samples) {
                    var += (v - mean) * (v - mean);
                }
                row.mean = mean;
                row.mc_se = samples.size() > 1
                                ? std::sqrt(var / static_cast<double>(samples.size() - 1) /
                                            static_cast<double>(samples.size()))
                                : 0.0;
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

ReplicationTable run_replications(const SimulationSpec& spec, Pipeline pipeline,
                                  unsigned threads) {
    const double kappa = spec.kappa;
    return run_replications(spec, pipeline, std::span<const double>(&kappa, 1), threads);
}

namespace {

std::string format_double(double value, const char* fmt) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), fmt, value);
    return buffer;
}

}  // namespace

std::string to_csv(const ReplicationTable& table) {
    std::string out = "model,kappa,s_set,pipeline,metric,mean,mc_se,n_reps,n_failures\n";
    for (const MetricRow& row : table.rows) {
        out += to_string(row.model);
        out += ',';
        out += format_double(row.kappa, "%g");
        out += ',';
        out += row.s_set ? to_string(*row.s_set) : "-";
        out += ',';
        out += to_string(row.pipeline);
        out += ',';
        out += row.metric;
        out += ',';
        out += format_double(row.mean, "%.6g");
        out += ',';
        out += format_double(row.mc_se, "%.6g");
        out += ',';
        out += std::to_string(row.n_reps);
        out += ',';
        out += std::to_string(row.n_failures);
        out += '\n';
    }
    return out;
}

std::string format_table(const ReplicationTable& table) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-9s %-8s %-6s %-10s %-8s %12s %12s %7s %6s\n",
                  "model", "kappa", "s_set", "pipeline", "metric", "mean", "mc_se",
                  "reps", "fail");
    out += line;
    for (const MetricRow& row : table.rows) {
        std::snprintf(line, sizeof(line), "%-9s %-8g %-6s %-10s %-8s %12.6g %12.6g %7zu %6zu\n",
                      to_string(row.model).c_str(), row.kappa,
                      row.s_set ? to_string(*row.s_set).c_str() : "-",
                      to_string(row.pipeline).c_str(), row.metric.c_str(), row.mean,
                      row.mc_se, row.n_reps, row.n_failures);
        out += line;
    }
    return out;
}

}  // namespace him
