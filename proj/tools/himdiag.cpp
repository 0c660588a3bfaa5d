// Command-line front end: influence diagnosis for high-dimensional
// regression (leave-one-out marginal-correlation scores with chi-square
// calibration and FDR flagging), classical Cook's distance, the logistic
// marginal-fit variant, and the seeded simulation driver.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "him/cooks.hpp"
#include "him/csv.hpp"
#include "him/downstream.hpp"
#include "him/glm_him.hpp"
#include "him/inference.hpp"
#include "him/report.hpp"
#include "him/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Options {
    std::string input;
    std::string response = "y";
    std::string output;
    std::string format = "json";
    std::string estimator = "moment";
    std::string sim_estimator = "robust";
    std::string model = "m1";
    std::string s_set = "s1";
    std::string pipeline = "him";
    std::string kappa = "0";
    double alpha = 0.05;
    std::size_t d = 0;
    std::size_t m = 0;
    std::size_t n = 100;
    std::size_t p = 1000;
    std::size_t n_infl = 10;
    std::uint64_t seed = 1;
    std::size_t reps = 200;
    unsigned threads = 0;
};

him::Estimator parse_estimator(const std::string& text) {
    if (text == "moment") return him::Estimator::moment;
    if (text == "robust") return him::Estimator::robust;
    throw him::ConfigError("unknown estimator: " + text);
}

std::vector<double> parse_kappa_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw him::ConfigError("bad kappa value: " + item);
        }
    }
    if (values.empty()) {
        throw him::ConfigError("empty kappa list");
    }
    return values;
}

void emit(const Options& opt, const std::string& content) {
    if (opt.output.empty()) {
        std::cout << content;
    } else {
        him::write_file_atomic(opt.output, content);
    }
}

int cmd_diagnose(const Options& opt) {
    const him::DataMatrix data = him::read_csv(opt.input, opt.response);
    const him::DiagnosisReport report =
        him::diagnose(data, opt.alpha, parse_estimator(opt.estimator), opt.input);
    emit(opt, opt.format == "csv" ? him::diagnosis_report_csv(report)
                                  : him::diagnosis_report_json(report));
    std::cerr << "flagged " << report.flagged.size() << " of " << data.n_rows()
              << " observations at alpha = " << opt.alpha << "\n";
    return kExitOk;
}

int cmd_cook(const Options& opt) {
    const him::DataMatrix data = him::read_csv(opt.input, opt.response);
    if (data.n_rows() <= data.n_cols() + 1) {
        std::cerr << "cook: requires n > p + 1 (got n = " << data.n_rows()
                  << ", p = " << data.n_cols()
                  << "); use `diagnose` for the high-dimensional measure\n";
        return kExitData;
    }
    const him::OlsFit fit = him::ols_fit(data);
    const std::vector<double> distances = him::cooks_distance_hat(fit);
    emit(opt, opt.format == "csv" ? him::cook_report_csv(distances)
                                  : him::cook_report_json(distances, opt.input));
    return kExitOk;
}

int cmd_glm_diagnose(const Options& opt) {
    const him::DataMatrix data = him::read_csv(opt.input, opt.response);
    const him::GlmInfluenceScores scores = him::glm_him_scores(data);
    const std::size_t m = opt.m > 0 ? opt.m : std::min<std::size_t>(10, data.n_rows());
    const std::vector<std::size_t> flagged = him::rank_influential(scores, m);
    emit(opt, opt.format == "csv" ? him::glm_report_csv(scores, flagged)
                                  : him::glm_report_json(scores, flagged, m, opt.input));
    return kExitOk;
}

int cmd_simulate(const Options& opt) {
    him::SimulationSpec spec;
    spec.model = him::parse_model(opt.model);
    spec.n = opt.n;
    spec.p = opt.p;
    spec.n_infl = opt.n_infl;
    spec.s_set = him::parse_s_set(opt.s_set);
    spec.alpha = opt.alpha;
    spec.seed = opt.seed;
    spec.replications = opt.reps;
    spec.estimator = parse_estimator(opt.sim_estimator);
    spec.sis_d = opt.d;
    spec.glm_flag_m = opt.m;
    const std::vector<double> kappas = parse_kappa_list(opt.kappa);
    const unsigned threads =
        opt.threads > 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());

    const him::ReplicationTable table =
        him::run_replications(spec, him::parse_pipeline(opt.pipeline), kappas, threads);
    std::cout << him::format_table(table);
    if (!opt.output.empty()) {
        him::write_file_atomic(opt.output, him::to_csv(table));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Influence diagnosis for high-dimensional regression"};
    app.require_subcommand(1);
    Options opt;

    auto add_io = [&](CLI::App* cmd) {
        cmd->add_option("--input", opt.input, "input CSV file")->required();
        cmd->add_option("--response", opt.response,
                        "response column name or zero-based index (default y)");
        cmd->add_option("--output", opt.output, "output file (stdout when omitted)");
        cmd->add_option("--format", opt.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* diagnose = app.add_subcommand(
        "diagnose", "leave-one-out marginal-correlation influence scores with FDR flagging");
    add_io(diagnose);
    diagnose->add_option("--alpha", opt.alpha, "FDR level (default 0.05)");
    diagnose->add_option("--estimator", opt.estimator, "moment or robust")
        ->check(CLI::IsMember({"moment", "robust"}));

    CLI::App* cook = app.add_subcommand("cook", "classical Cook's distance (needs n > p + 1)");
    add_io(cook);

    CLI::App* glm = app.add_subcommand(
        "glm-diagnose", "marginal logistic influence scores, top-m flagging");
    add_io(glm);
    glm->add_option("--m", opt.m, "number of observations to flag (default min(10, n))");

    CLI::App* simulate = app.add_subcommand("simulate", "seeded replication experiments");
    simulate->add_option("--model", opt.model, "m1, m2, m3 or logistic")
        ->check(CLI::IsMember({"m1", "m2", "m3", "logistic"}));
    simulate->add_option("--pipeline", opt.pipeline,
                         "him, sis, sis+him, lasso, lasso+him or glm-him")
        ->check(CLI::IsMember({"him", "sis", "sis+him", "lasso", "lasso+him", "glm-him"}));
    simulate->add_option("--kappa", opt.kappa, "perturbation strength, comma-separated list");
    simulate->add_option("--s-set", opt.s_set, "shifted column set for m2/m3")
        ->check(CLI::IsMember({"s1", "s2", "s3"}));
    simulate->add_option("--n", opt.n, "observations (default 100)");
    simulate->add_option("--p", opt.p, "predictors (default 1000)");
    simulate->add_option("--n-infl", opt.n_infl, "contaminated rows (default 10)");
    simulate->add_option("--alpha", opt.alpha, "FDR level (default 0.05)");
    simulate->add_option("--estimator", opt.sim_estimator,
                         "plug-in estimator for influence scores (default robust)")
        ->check(CLI::IsMember({"moment", "robust"}));
    simulate->add_option("--d", opt.d, "screening size (default floor(n/log n))");
    simulate->add_option("--m", opt.m, "flag count for glm-him (default n-infl)");
    simulate->add_option("--seed", opt.seed, "RNG seed (default 1)");
    simulate->add_option("--reps", opt.reps, "replications (default 200)");
    simulate->add_option("--output", opt.output, "CSV output file");
    simulate->add_option("--threads", opt.threads, "worker threads (default hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(diagnose)) return cmd_diagnose(opt);
        if (app.got_subcommand(cook)) return cmd_cook(opt);
        if (app.got_subcommand(glm)) return cmd_glm_diagnose(opt);
        if (app.got_subcommand(simulate)) return cmd_simulate(opt);
    } catch (const him::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const him::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const him::Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitConfig;
}
