#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "qsdr/config.hpp"
#include "qsdr/dataset.hpp"
#include "qsdr/errors.hpp"

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/qsdr_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("a clean three-column file loads with the named response") {
    TempFile f("clean.csv",
               "y,x1,x2\n"
               "1.5,0.1,0.2\n"
               "2.5,0.3,0.4\n"
               "3.5,0.5,0.6\n"
               "4.5,0.7,0.8\n"
               "5.5,0.9,1.0\n");
    auto data = qsdr::load_dataset_csv(f.path, "y");
    CHECK(data.X.rows() == 5);
    CHECK(data.X.cols() == 2);
    CHECK(data.Y[0] == 1.5);
    CHECK(data.X(4, 1) == 1.0);
    CHECK(data.rows_dropped == 0);
    CHECK(data.column_names == std::vector<std::string>{"x1", "x2"});
}

TEST_CASE("rows with non-finite values are dropped and counted") {
    TempFile f("nan.csv",
               "y,x1\n"
               "1.0,0.0\n"
               "NaN,0.5\n"
               "2.0,1.0\n");
    auto data = qsdr::load_dataset_csv(f.path, "y");
    CHECK(data.X.rows() == 2);
    CHECK(data.rows_dropped == 1);
}

TEST_CASE("missing response column names the offender") {
    TempFile f("cols.csv", "a,b\n1,2\n");
    try {
        qsdr::load_dataset_csv(f.path, "weight");
        CHECK(false);
    } catch (const qsdr::MissingColumn& e) {
        CHECK(std::string(e.what()).find("weight") != std::string::npos);
    }
}

TEST_CASE("error taxonomy of the loader") {
    CHECK_THROWS_AS(qsdr::load_dataset_csv("/nonexistent/file.csv", "y"), qsdr::FileNotFound);

    TempFile text("text.csv", "y,x\nfoo,bar\nbaz,qux\n");
    CHECK_THROWS_AS(qsdr::load_dataset_csv(text.path, "y"), qsdr::EmptyAfterFiltering);

    TempFile empty("empty.csv", "y,x\n");
    CHECK_THROWS_AS(qsdr::load_dataset_csv(empty.path, "y"), qsdr::NoNumericData);
}

TEST_CASE("save and reload round-trips exactly") {
    qsdr::Dataset data;
    data.X.resize(3, 2);
    data.X << 0.1234567890123456, -1e-17, 3.0000000000000004, 7.25, 1e300, -0.5;
    data.Y.resize(3);
    data.Y << 1.0 / 3.0, -2.718281828459045, 0.0;
    data.response_name = "y";
    data.column_names = {"x1", "x2"};

    TempFile f("roundtrip.csv", "");
    qsdr::save_dataset_csv(data, f.path);
    auto loaded = qsdr::load_dataset_csv(f.path, "y");
    CHECK((loaded.X - data.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.Y - data.Y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quoted fields and index-based response selection") {
    TempFile f("quoted.csv",
               "\"resp onse\",x1\n"
               "1.0,2.0\n"
               "3.0,4.0\n");
    auto byname = qsdr::load_dataset_csv(f.path, "resp onse");
    CHECK(byname.Y[1] == 3.0);
    auto byindex = qsdr::load_dataset_csv(f.path, "1");
    CHECK(byindex.Y[0] == 2.0);
    CHECK(byindex.X(0, 0) == 1.0);
}

TEST_CASE("config parsing, types, overrides") {
    auto cfg = qsdr::ConfigMap::from_string(
        "# comment\n"
        "estimator.qopg.tau_grid = 0.25, 0.5, 0.75\n"
        "estimator.qopg.max_rounds = 7\n"
        "simulate.seed = 12345\n"
        "cli.verbose = true\n"
        "bandwidth.scale = 2.34\n");
    CHECK(cfg.get_int("estimator.qopg.max_rounds", 0) == 7);
    CHECK(cfg.get_double("bandwidth.scale", 0.0) == 2.34);
    CHECK(cfg.get_bool("cli.verbose", false));
    CHECK(cfg.get_u64("simulate.seed", 0) == 12345);
    CHECK(cfg.get_doubles("estimator.qopg.tau_grid", {}) ==
          std::vector<double>{0.25, 0.5, 0.75});
    CHECK(cfg.get_int("absent.key", 42) == 42);

    cfg.set("estimator.qopg.max_rounds", "9");
    CHECK(cfg.get_int("estimator.qopg.max_rounds", 0) == 9);

    CHECK_THROWS_AS(qsdr::ConfigMap::from_string("not a pair\n"), qsdr::ConfigError);
    CHECK_THROWS_AS(cfg.get_int("bandwidth.scale", 0), qsdr::ConfigError);
}
