#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "capstek/cli.hpp"
#include "capstek/io.hpp"

namespace cli = capstek::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::vector<std::string> keys_of(const nlohmann::ordered_json& j) {
    std::vector<std::string> k;
    for (auto it = j.begin(); it != j.end(); ++it) k.push_back(it.key());
    return k;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("capstek_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::vector<std::string> kSmall{"--n-radial", "10", "--n-angular", "20"};

std::vector<std::string> with_small(std::vector<std::string> a) {
    a.insert(a.end(), kSmall.begin(), kSmall.end());
    return a;
}

}  // namespace

TEST(Cli, CapVerify) {
    const auto r = run({"cap-verify", "--r", "0.785398163"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto j = nlohmann::ordered_json::parse(r.out);
    EXPECT_NEAR(j["sigma0"].get<double>(), -1.0, 1e-8);
    EXPECT_NEAR(j["sigma1"].get<double>(), 1.0, 1e-8);
    EXPECT_NEAR(j["fem"]["sigma0"].get<double>(), -1.0, 1e-2);
    EXPECT_NEAR(j["fem"]["sigma1"].get<double>(), 1.0, 1e-2);
    EXPECT_EQ(keys_of(j), (std::vector<std::string>{"r", "sigma0", "sigma1", "exact", "radial", "fem", "theta"}));
    EXPECT_NE(r.err.find("cap-verify"), std::string::npos);
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, CapVerifyDegrees) {
    const auto a = run(with_small({"cap-verify", "--r", "45", "--degrees"}));
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NEAR(nlohmann::json::parse(a.out)["sigma0"].get<double>(), -1.0, 1e-8);
}

TEST(Cli, AnnulusFamilyEquator) {
    const auto r = run({"annulus-family", "--r", "1.570796327"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"r", "a", "s0", "mu", "res0", "res1", "res2", "res3", "embedded",
                                                 "theta", "bound", "slack"}));
    EXPECT_NEAR(std::stod(rows[1][1]), 0.0, 1e-8);
    EXPECT_NEAR(std::stod(rows[1][2]), 1.1107207, 1e-7);
    EXPECT_NEAR(std::stod(rows[1][3]), 0.9003163, 1e-7);
    EXPECT_EQ(rows[1][8], "true");
    EXPECT_NEAR(std::stod(rows[1][9]), 2 * M_PI * M_PI, 1e-8);
}

TEST(Cli, AnnulusFamilyGrid) {
    const auto r = run({"annulus-family", "--r-grid", "1.4,1.0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_NEAR(std::stod(rows[1][0]), 1.4, 1e-15);
    EXPECT_NEAR(std::stod(rows[2][0]), 1.0, 1e-15);
    for (int i = 1; i <= 2; ++i)
        for (int c = 4; c < 8; ++c) EXPECT_LT(std::abs(std::stod(rows[i][c])), 1e-6);
}

TEST(Cli, UnknownFlagIsUsageErrorAndWritesNothing) {
    const auto dir = scratch_dir("bogus");
    const auto target = dir / "spec.json";
    const auto r = run({"spectrum", "--bogus", "--out", target.string()});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_TRUE(r.out.empty());
    EXPECT_FALSE(r.err.empty());
    EXPECT_TRUE(fs::is_empty(dir));
    EXPECT_EQ(run({"spectrum", "--bogus"}).code, cli::kExitUsage);
}

TEST(Cli, OtherUsageErrors) {
    EXPECT_EQ(run({}).code, cli::kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"theta", "--format", "xml"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"mesh", "--format", "csv"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"spectrum", "--metric", "torus"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"theta", "--r", "abc"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"optimize", "--steps", "-3"}).code, cli::kExitUsage);
}

TEST(Cli, HelpExitsZero) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("cap-verify"), std::string::npos);
}

TEST(Cli, NotAdmissibleIsComputationError) {
    const auto r = run({"spectrum", "--metric", "cap", "--r", "1.5707963267948966"});
    EXPECT_EQ(r.code, cli::kExitComputation);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["error"]["kind"], "NotAdmissible");
    EXPECT_TRUE(j["error"].contains("gap"));
}

TEST(Cli, InvalidRadiusIsComputationError) {
    const auto r = run({"cap-verify", "--r", "2.0"});
    EXPECT_EQ(r.code, cli::kExitComputation);
    EXPECT_EQ(nlohmann::json::parse(r.out)["error"]["kind"], "InvalidArgument");
}

TEST(Cli, MeshJson) {
    const auto r = run({"mesh", "--n-radial", "3", "--n-angular", "8"});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["vertices"].size(), 25u);
    const auto a = run({"mesh", "--kind", "annulus", "--n-radial", "4", "--n-angular", "12"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(nlohmann::json::parse(a.out)["vertices"].size(), 60u);
}

TEST(Cli, SpectrumIsDeterministic) {
    const auto args = with_small({"spectrum", "--metric", "random", "--seed", "5", "--modes"});
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto j = nlohmann::ordered_json::parse(a.out);
    EXPECT_EQ(keys_of(j), (std::vector<std::string>{"alpha", "eigenvalues", "gap", "admissible", "lambda0_dirichlet",
                                                    "clusters", "nodal_domains", "metric", "vertices", "triangles",
                                                    "boundary_vertices", "boundary_modes"}));
    EXPECT_EQ(j["eigenvalues"].size(), 6u);
    const auto c = run(with_small({"spectrum", "--metric", "random", "--seed", "6"}));
    EXPECT_NE(nlohmann::ordered_json::parse(c.out)["eigenvalues"], j["eigenvalues"]);
}

TEST(Cli, SpectrumCsv) {
    const auto r = run(with_small({"spectrum", "--metric", "cap", "--format", "csv", "--count", "4"}));
    ASSERT_EQ(r.code, 0);
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"index", "sigma", "cluster_size", "nodal_domains"}));
    EXPECT_EQ(rows[2][2], "2");
}

TEST(Cli, FloatsCarrySeventeenDigits) {
    const auto r = run(with_small({"theta"}));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\"r\": 0.78539816339744828"), std::string::npos) << r.out;
}

TEST(Cli, ThetaReportKeyOrder) {
    const auto r = run(with_small({"theta", "--metric", "cap"}));
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::ordered_json::parse(r.out);
    EXPECT_EQ(keys_of(j), (std::vector<std::string>{"r", "sigma0", "sigma1", "boundary_length", "area", "theta",
                                                    "bound", "slack", "dirichlet_gap", "extremality"}));
}

TEST(Cli, OutFileAndStdout) {
    const auto dir = scratch_dir("out");
    const auto target = dir / "theta.csv";
    const auto r = run(with_small({"theta", "--format", "csv", "--out", target.string()}));
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(target);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), run(with_small({"theta", "--format", "csv"})).out);
    const auto bad = run(with_small({"theta", "--out", (dir / "missing" / "x.json").string()}));
    EXPECT_EQ(bad.code, cli::kExitComputation);
}

TEST(Cli, OptimizeTraceIsMonotone) {
    const auto r = run(with_small({"optimize", "--steps", "8"}));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_GE(rows.size(), 3u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"step", "theta", "sigma0", "sigma1", "gap", "step_size"}));
    for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_GT(std::stod(rows[i][1]), std::stod(rows[i - 1][1]));
    const auto j = run(with_small({"optimize", "--steps", "2", "--format", "json"}));
    ASSERT_EQ(j.code, 0);
    EXPECT_EQ(keys_of(nlohmann::ordered_json::parse(j.out)),
              (std::vector<std::string>{"iterations", "stalled", "final", "final_metric"}));
}

TEST(Cli, SweepIsThreadInvariant) {
    const auto base = with_small({"sweep", "--r-grid", "0.5,1.0", "--metrics", "flat,cap,random"});
    auto threaded = base;
    threaded.insert(threaded.end(), {"--threads", "3"});
    const auto a = run(base), b = run(threaded);
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto rows = parse_csv(a.out);
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0][1], "metric");
    EXPECT_EQ(rows[0].back(), "status");
    EXPECT_EQ(rows[1][1], "flat");
    EXPECT_EQ(rows[3][1], "random");
}

TEST(Cli, SweepReportsInadmissibleCells) {
    const auto r = run(with_small({"sweep", "--r-grid", "1.5", "--metrics", "cap,annulus"}));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1].back(), "ok");
}

TEST(Io, FormatDouble) {
    EXPECT_EQ(capstek::format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(capstek::format_double(-2.0), "-2");
    EXPECT_EQ(capstek::format_double(std::nan("")), "nan");
    EXPECT_EQ(capstek::format_double(-INFINITY), "-inf");
}

TEST(Io, JsonText) {
    nlohmann::ordered_json j;
    j["z"] = 1.0 / 3.0;
    j["a"] = std::nan("");
    j["m"] = {1, 2};
    const auto text = capstek::to_json_text(j);
    EXPECT_EQ(text, "{\n  \"z\": 0.33333333333333331,\n  \"a\": null,\n  \"m\": [\n    1,\n    2\n  ]\n}\n");
}

TEST(Io, Csv) {
    capstek::CsvTable t{{"name", "value"}, {}};
    t.add_row({"plain", capstek::csv_cell(1.5)});
    t.add_row({"a,b", "say \"hi\""});
    EXPECT_THROW(t.add_row({"only one"}), std::exception);
    std::ostringstream os;
    capstek::write_csv(os, t);
    EXPECT_EQ(os.str(), "name,value\nplain,1.5\n\"a,b\",\"say \"\"hi\"\"\"\n");
    EXPECT_EQ(capstek::csv_cell(true), "true");
    EXPECT_EQ(capstek::csv_cell(7), "7");
}
