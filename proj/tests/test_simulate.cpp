#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "him/downstream.hpp"
#include "him/simulate.hpp"
#include "oracles.hpp"

using namespace him;

namespace {

SimulationSpec small_spec(Model model) {
    SimulationSpec spec;
    spec.model = model;
    spec.n = 30;
    spec.p = model == Model::logistic ? 12 : 40;
    spec.n_infl = 4;
    spec.kappa = 0.8;
    spec.seed = 7;
    spec.replications = 3;
    spec.cv_folds = 4;
    spec.n_lambda = 20;
    return spec;
}

}  // namespace

TEST_CASE("ar1 rows are iid standard normal at rho 0 and have the stated covariance") {
    Rng rng(101);
    const std::size_t rows = 100000;
    const std::size_t p = 12;
    double sum = 0.0, sum2 = 0.0, lag1 = 0.0, lag3 = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const std::vector<double> row = sample_ar1_row(p, 0.5, rng);
        for (std::size_t j = 0; j < p; ++j) {
            sum += row[j];
            sum2 += row[j] * row[j];
        }
        lag1 += row[4] * row[5];
        lag3 += row[4] * row[7];
    }
    const double total = static_cast<double>(rows * p);
    CHECK(std::abs(sum / total) < 0.01);
    CHECK(std::abs(sum2 / total - 1.0) < 0.01);
    CHECK(std::abs(lag1 / rows - 0.5) < 0.01);
    CHECK(std::abs(lag3 / rows - 0.125) < 0.01);

    // rho = 0 decouples the recursion: lag covariance vanishes.
    Rng rng0(102);
    double lag = 0.0;
    for (std::size_t r = 0; r < 20000; ++r) {
        const std::vector<double> row = sample_ar1_row(4, 0.0, rng0);
        lag += row[0] * row[1];
    }
    CHECK(std::abs(lag / 20000.0) < 0.02);
}

TEST_CASE("model 1 at kappa 0 equals the clean generator output") {
    SimulationSpec spec = small_spec(Model::m1);
    spec.kappa = 0.0;
    Rng a(Rng::derive(spec.seed, 0, 0));
    const GeneratedInstance clean = gen_model1(spec, a);

    spec.kappa = 1.6;
    Rng b(Rng::derive(spec.seed, 0, 0));
    const GeneratedInstance dirty = gen_model1(spec, b);

    // Identical draws; the perturbation only touches the first n_infl responses.
    CHECK(clean.data.x_data() == dirty.data.x_data());
    for (std::size_t i = spec.n_infl; i < spec.n; ++i) {
        CHECK(clean.data.y()[i] == dirty.data.y()[i]);
    }
    bool changed = false;
    for (std::size_t i = 0; i < spec.n_infl; ++i) {
        if (clean.data.y()[i] != dirty.data.y()[i]) changed = true;
    }
    CHECK(changed);
    CHECK(clean.true_influential == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(clean.beta_true[0] == 3.0);
    CHECK(clean.beta_true[1] == 1.5);
    CHECK(clean.beta_true[4] == 2.0);
    CHECK(clean.beta_true[2] == 0.0);
}

TEST_CASE("clean rows follow the linear model with unit noise") {
    SimulationSpec spec;
    spec.model = Model::m1;
    spec.n = 4000;
    spec.p = 10;
    spec.n_infl = 0;
    spec.kappa = 0.0;
    Rng rng(103);
    const GeneratedInstance inst = gen_model1(spec, rng);
    double ss = 0.0;
    for (std::size_t i = 0; i < spec.n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < spec.p; ++j) {
            fit += inst.beta_true[j] * inst.data.x(i, j);
        }
        const double resid = inst.data.y()[i] - fit;
        ss += resid * resid;
    }
    CHECK(std::abs(ss / spec.n - 1.0) < 0.08);
}

TEST_CASE("model 2 shifts the stored predictors but not the response") {
    SimulationSpec spec = small_spec(Model::m2);
    spec.s_set = SSet::s1;  // clipped to all 40 columns here
    spec.kappa = 1.0;
    Rng a(Rng::derive(spec.seed, 3, 0));
    const GeneratedInstance dirty = gen_model2(spec, a);
    spec.kappa = 0.0;
    Rng b(Rng::derive(spec.seed, 3, 0));
    const GeneratedInstance clean = gen_model2(spec, b);

    CHECK(clean.data.y() == dirty.data.y());
    for (std::size_t i = 0; i < spec.n_infl; ++i) {
        for (std::size_t j = 0; j < spec.p; ++j) {
            CHECK(dirty.data.x(i, j) ==
                  doctest::Approx(clean.data.x(i, j) + 30.0).epsilon(1e-12));
        }
    }
    for (std::size_t i = spec.n_infl; i < spec.n; ++i) {
        CHECK(dirty.data.x(i, 0) == clean.data.x(i, 0));
    }
}

TEST_CASE("model 3 composes the response and predictor perturbations") {
    SimulationSpec spec = small_spec(Model::m3);
    spec.kappa = 0.5;
    Rng a(Rng::derive(spec.seed, 4, 0));
    const GeneratedInstance both = gen_model3(spec, a);

    spec.model = Model::m1;
    Rng b(Rng::derive(spec.seed, 4, 0));
    const GeneratedInstance response_only = gen_model1(spec, b);

    // Same response as the response-only model (built from the clean X)...
    CHECK(both.data.y() == response_only.data.y());
    // ...plus the covariate shift on the contaminated rows.
    CHECK(both.data.x(0, 0) ==
          doctest::Approx(response_only.data.x(0, 0) + 15.0).epsilon(1e-12));
    CHECK(both.data.x(spec.n_infl, 0) == response_only.data.x(spec.n_infl, 0));
}

TEST_CASE("logistic generator matches its probability law") {
    SimulationSpec spec;
    spec.model = Model::logistic;
    spec.n = 20000;
    spec.p = 4;
    spec.n_infl = 0;
    spec.kappa = 0.0;
    Rng rng(105);
    const GeneratedInstance inst = gen_logistic(spec, rng);
    // Bin by the linear predictor and compare empirical rates.
    double correct = 0.0;
    double expected = 0.0;
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double eta = 2.0 + 5.0 * inst.data.x(i, 0) + 5.0 * inst.data.x(i, 1);
        const double prob = 1.0 / (1.0 + std::exp(-eta));
        expected += prob;
        correct += inst.data.y()[i];
    }
    CHECK(std::abs(correct - expected) / spec.n < 0.01);

    // kappa = 0 leaves the influential block on the clean law.
    SimulationSpec tiny = small_spec(Model::logistic);
    tiny.kappa = 0.0;
    Rng c(Rng::derive(tiny.seed, 5, 0));
    const GeneratedInstance a = gen_logistic(tiny, c);
    tiny.kappa = 1.2;
    Rng d(Rng::derive(tiny.seed, 5, 0));
    const GeneratedInstance b = gen_logistic(tiny, d);
    CHECK(a.data.x_data() == b.data.x_data());
    bool same = true;
    for (std::size_t i = tiny.n_infl; i < tiny.n; ++i) {
        if (a.data.y()[i] != b.data.y()[i]) same = false;
    }
    CHECK(same);
}

TEST_CASE("single replication equals the manual run with the derived substream") {
    SimulationSpec spec = small_spec(Model::m1);
    spec.replications = 1;
    const ReplicationTable table = run_replications(spec, Pipeline::sis, 1);
    REQUIRE(table.rows.size() == 1);

    Rng rng(Rng::derive(spec.seed, 0, 0));
    const GeneratedInstance inst = gen_model1(spec, rng);
    const auto screen = sis_screen(inst.data, 8);  // floor(30 / log 30) = 8
    const std::vector<std::size_t> support{0, 1, 4};
    const double cp = eval_cp(screen.selected, support);
    CHECK(table.rows[0].metric == "cp");
    CHECK(table.rows[0].mean == cp);
    CHECK(table.rows[0].n_reps == 1);
}

TEST_CASE("serial and parallel drivers produce identical tables") {
    SimulationSpec spec = small_spec(Model::m3);
    spec.replications = 6;
    const std::vector<double> kappas{0.0, 0.8};
    const ReplicationTable serial = run_replications(spec, Pipeline::him, kappas, 1);
    const ReplicationTable parallel = run_replications(spec, Pipeline::him, kappas, 4);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t r = 0; r < serial.rows.size(); ++r) {
        CHECK(serial.rows[r].metric == parallel.rows[r].metric);
        CHECK(serial.rows[r].mean == parallel.rows[r].mean);
        CHECK(serial.rows[r].mc_se == parallel.rows[r].mc_se);
        CHECK(serial.rows[r].kappa == parallel.rows[r].kappa);
        CHECK(serial.rows[r].n_reps == parallel.rows[r].n_reps);
    }
    CHECK(to_csv(serial) == to_csv(parallel));
}

TEST_CASE("the csv table carries the documented columns") {
    SimulationSpec spec = small_spec(Model::m1);
    spec.replications = 2;
    const ReplicationTable table = run_replications(spec, Pipeline::him, 1);
    const std::string csv = to_csv(table);
    CHECK(csv.rfind("model,kappa,s_set,pipeline,metric,mean,mc_se,n_reps,n_failures\n", 0) == 0);
    CHECK(csv.find("m1,0.8,-,him,power,") != std::string::npos);
}
