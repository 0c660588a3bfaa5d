#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "him/csv.hpp"
#include "him/inference.hpp"
#include "him/report.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace him;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

}  // namespace

TEST_CASE("read_csv minimal file with header") {
    const auto path = temp_file("him_minimal.csv");
    write_text(path, "y,x1\n1,2\n2,5\n3,9\n");
    const DataMatrix data = read_csv(path.string(), "y");
    CHECK(data.n_rows() == 3);
    CHECK(data.n_cols() == 1);
    CHECK(data.y() == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(data.x(2, 0) == 9.0);
    CHECK(data.column_names() == std::vector<std::string>{"x1"});

    // Selecting by index works too.
    const DataMatrix by_index = read_csv(path.string(), "0");
    CHECK(by_index.y() == data.y());
}

TEST_CASE("read_csv rejects malformed input with locations") {
    const auto path = temp_file("him_bad.csv");

    write_text(path, "y,x1\n1,2\n2\n3,9\n");
    CHECK_THROWS_AS(read_csv(path.string(), "y"), ParseError);

    write_text(path, "y,x1\n1,2\n2,nan\n3,9\n");
    try {
        read_csv(path.string(), "y");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 1);
    }

    write_text(path, "y,x1\n1,2\n2,abc\n3,9\n");
    CHECK_THROWS_AS(read_csv(path.string(), "y"), ParseError);

    write_text(path, "y,x1\n1,2\n2,4\n3,9\n");
    CHECK_THROWS_AS(read_csv(path.string(), "z"), ConfigError);
    CHECK_THROWS_AS(read_csv(path.string(), "7"), ConfigError);
}

TEST_CASE("csv write/read round trip preserves every bit") {
    const DataMatrix data = oracles::random_data(50, 10, 111);
    const auto path = temp_file("him_roundtrip.csv");
    write_csv(path.string(), data);
    const DataMatrix back = read_csv(path.string(), "y");
    CHECK(back.n_rows() == 50);
    CHECK(back.n_cols() == 10);
    CHECK(back.y() == data.y());
    CHECK(back.x_data() == data.x_data());
}

TEST_CASE("headerless files resolve the response by index") {
    const auto path = temp_file("him_headerless.csv");
    write_text(path, "1,10,100\n2,20,200\n3,30,330\n");
    const DataMatrix data = read_csv(path.string(), "1");
    CHECK(data.y() == std::vector<double>{10.0, 20.0, 30.0});
    CHECK(data.x(0, 0) == 1.0);
    CHECK(data.x(0, 1) == 100.0);
    CHECK_THROWS_AS(read_csv(path.string(), "y"), ConfigError);
}

TEST_CASE("diagnosis report JSON carries the stable schema") {
    const DataMatrix data = oracles::random_data(12, 8, 112);
    const DiagnosisReport report = diagnose(data, 0.05, Estimator::moment, "unit");
    const std::string text = diagnosis_report_json(report);
    const nlohmann::json j = nlohmann::json::parse(text);
    for (const char* key : {"meta", "scores", "statistics", "pvalues", "flagged", "params"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["scores"].size() == 12);
    CHECK(j["statistics"].size() == 12);
    CHECK(j["pvalues"].size() == 12);
    CHECK(j["meta"]["estimator"] == "moment");
    CHECK(j["meta"]["sd_divisor"] == "n-1");
    CHECK(j["params"]["alpha"] == 0.05);
    for (std::size_t k = 0; k < 12; ++k) {
        CHECK(j["scores"][k].get<double>() == report.scores.d[k]);
        CHECK(j["statistics"][k].get<double>() == report.scores.stat[k]);
    }
}

TEST_CASE("diagnosis report CSV marks flagged rows") {
    DiagnosisReport report;
    report.scores.d = {0.1, 0.2};
    report.scores.stat = {10.0, 20.0};
    report.scores.n = 2;
    report.scores.p = 3;
    report.pvalues = {0.5, 0.001};
    report.alpha = 0.05;
    report.flagged = {1};
    const std::string csv = diagnosis_report_csv(report);
    CHECK(csv.find("index,d,stat,pvalue,flagged\n") == 0);
    CHECK(csv.find("0,") != std::string::npos);
    CHECK(csv.find(",0\n") != std::string::npos);
    CHECK(csv.find(",1\n") != std::string::npos);
}

TEST_CASE("atomic writes replace the target in one step") {
    const auto path = temp_file("him_atomic.txt");
    write_file_atomic(path.string(), "first\n");
    write_file_atomic(path.string(), "second\n");
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "second");
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
}
