#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "repen/bench.hpp"
#include "repen/io.hpp"

using namespace repen;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("repen_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& content) {
        std::ofstream os(path);
        os << content;
    }
};

}  // namespace

TEST_CASE("report CSV round-trips exactly") {
    BenchReport report;
    report.experiment = "S1";
    report.n = 200;
    report.n_reps = 50;
    report.master_seed = 42;
    report.threshold = 2;
    report.notes = {"mallows_sigma2=residual_largest_admissible(n*risk/(n-D))"};
    report.rows = {
        {"Mal", 1.9284713250981724, 0.04123, 2.001, 0.051, 50, 0},
        {"penRad", 1.0 / 3.0, 1e-17, 0.1 + 0.2, 0.3333333333333333, 50, 1},
    };
    TempFile tmp("roundtrip.csv");
    write_report_csv(report, tmp.path);
    const BenchReport back = read_report_csv(tmp.path);
    CHECK(back.experiment == report.experiment);
    CHECK(back.n == report.n);
    CHECK(back.n_reps == report.n_reps);
    CHECK(back.master_seed == report.master_seed);
    REQUIRE(back.rows.size() == report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(back.rows[i].name == report.rows[i].name);
        CHECK(back.rows[i].c_or == report.rows[i].c_or);
        CHECK(back.rows[i].c_or_se == report.rows[i].c_or_se);
        CHECK(back.rows[i].c_path_or == report.rows[i].c_path_or);
        CHECK(back.rows[i].c_path_or_se == report.rows[i].c_path_or_se);
        CHECK(back.rows[i].n_valid == report.rows[i].n_valid);
    }
}

TEST_CASE("xy reader: separators, comments, validation") {
    TempFile tmp("data.txt");
    tmp.write("# toy data\n0.1 1.5\n0.2,2.5\n\n0.9\t-1.0 # trailing comment\n");
    const DataSet d = read_xy_file(tmp.path);
    REQUIRE(d.size() == 3);
    CHECK(d.x[1] == 0.2);
    CHECK(d.y[2] == -1.0);

    TempFile bad("bad.txt");
    bad.write("1.5 2.0\n");  // x outside [0,1]
    CHECK_THROWS_AS(read_xy_file(bad.path), std::runtime_error);
    TempFile onecol("onecol.txt");
    onecol.write("0.5\n");
    CHECK_THROWS_AS(read_xy_file(onecol.path), std::runtime_error);
    CHECK_THROWS_AS(read_xy_file("does_not_exist.txt"), std::runtime_error);
}

TEST_CASE("config parser") {
    TempFile tmp("cfg.txt");
    tmp.write("# run setup\nexperiment = S1\nn_reps=250\n seed =  7 # inline\n");
    const auto kv = parse_config_file(tmp.path);
    CHECK(kv.at("experiment") == "S1");
    CHECK(kv.at("n_reps") == "250");
    CHECK(kv.at("seed") == "7");

    TempFile bad("badcfg.txt");
    bad.write("just words\n");
    CHECK_THROWS_AS(parse_config_file(bad.path), std::runtime_error);
}

TEST_CASE("manifest writer emits the run trace") {
    RunManifest m;
    m.version = "0.1.0";
    m.master_seed = 9;
    m.workers = 4;
    m.config_echo = {"experiment=S1 n_reps=50"};
    m.outputs = {"out/S1.csv"};
    m.wall_seconds = 1.25;
    TempFile tmp("manifest.txt");
    write_manifest(m, tmp.path);
    std::ifstream is(tmp.path);
    std::string all((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(all.find("seed = 9") != std::string::npos);
    CHECK(all.find("out/S1.csv") != std::string::npos);
}
