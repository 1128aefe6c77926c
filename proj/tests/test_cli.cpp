#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "toruslab/cli.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace toruslab;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "toruslab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("toruslab_test_" + name)).string();
}

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = temp_path(name);
    std::ofstream(path) << text;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("verify a on the cat map exits 0 with a JSON report") {
    const auto r = run({"verify", "a", "--catalog", "cat"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["system"]["name"] == "cat");
    CHECK(j["claims"][0]["name"] == "theorem_a");
    CHECK(j["exit_code"] == 0);
}

TEST_CASE("spectrum of the identity is zero") {
    const auto r = run({"spectrum", "--catalog", "identity", "--steps", "1000"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["exponents"][0] == 0.0);
    CHECK(j["exponents"][1] == 0.0);
}

TEST_CASE("spectrum history CSV") {
    const auto path = temp_path("history.csv");
    const auto r = run({"spectrum", "--catalog", "cat", "--steps", "20000", "--out", path});
    REQUIRE(r.code == 0);
    std::istringstream csv(slurp(path));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "step,lambda_1,lambda_2");
    std::size_t rows = 0;
    std::string last;
    while (std::getline(csv, line)) {
        ++rows;
        last = line;
    }
    CHECK(rows > 100);
    CHECK(last.rfind("20000,", 0) == 0);
    std::remove(path.c_str());
}

TEST_CASE("a non-invertible matrix is rejected with exit 1") {
    const auto path = write_temp("bad.json", R"({"dim": 2, "matrix": [[2, 0], [0, 1]]})");
    const auto r = run({"verify", "all", "--system", path});
    CHECK(r.code == 1);
    CHECK(r.err.find("matrix not in GL(n,Z)") != std::string::npos);
    CHECK(r.out.empty());
    std::remove(path.c_str());
}

TEST_CASE("malformed JSON and missing fields report the location") {
    auto path = write_temp("broken.json", "{\"dim\": 2,\n");
    auto r = run({"homology", "--system", path});
    CHECK(r.code == 1);
    CHECK(r.err.find("line") != std::string::npos);

    std::ofstream(path) << R"({"matrix": [[1, 0], [0, 1]]})";
    r = run({"homology", "--system", path});
    CHECK(r.code == 1);
    CHECK(r.err.find("dim") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"verify"}).code == 1);
    CHECK(run({"verify", "z", "--catalog", "cat"}).code == 1);
    CHECK(run({"verify", "a"}).code == 1);
    CHECK(run({"verify", "a", "--catalog", "cat", "--system", "x.json"}).code == 1);
    CHECK(run({"verify", "a", "--catalog", "no-such-system"}).code == 1);
    CHECK(run({"verify", "a", "--catalog", "cat", "--epsilon", "0"}).code == 1);
    CHECK(run({"verify", "a", "--catalog", "cat", "--steps", "10"}).code == 1);
    CHECK(run({"spectrum", "--catalog", "cat", "--format", "xml"}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("only hypothesis rows failing exits 3") {
    const auto r = run({"verify", "ca", "--catalog", "cat"});
    CHECK(r.code == 3);
    CHECK(nlohmann::json::parse(r.out)["exit_code"] == 3);
}

TEST_CASE("homology of the cat map") {
    const auto r = run({"homology", "--catalog", "cat"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["degrees"].size() == 3);
    CHECK(j["degrees"][1]["matrix"] == nlohmann::json::parse("[[2,1],[1,1]]"));
    CHECK(j["spectral_radius"]["radius"].get<double>() == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0));
    CHECK(j["spectral_radius"]["degree"] == 1);
}

TEST_CASE("entropy and metric commands") {
    auto r = run({"entropy", "--catalog", "cat", "--samples", "64"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["entropy"].get<double>() == doctest::Approx(std::log((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(0.05));
    CHECK(j["volume_growth"].size() == 3);

    r = run({"metric", "--catalog", "cat", "--epsilon", "0.5", "--samples", "4"});
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["lp"].size() == 2);
    CHECK(j["lp"][0]["excluded"] == 0);
    CHECK(j["sample"]["gram"].size() == 2);
}

TEST_CASE("catalog lists every built-in system") {
    const auto r = run({"catalog"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["systems"].size() == 8);
    CHECK(j["systems"][0]["name"] == "identity");
}

TEST_CASE("CSV reports and --out") {
    const auto path = temp_path("report.csv");
    const auto r = run({"verify", "bc", "--catalog", "cat", "--format", "csv", "--out", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    const auto text = slurp(path);
    CHECK(text.rfind("system,claim,row_claim,", 0) == 0);
    CHECK(text.find("cat,corollary_b,") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("seeded runs are byte-identical across thread counts") {
    const std::vector<std::string> base = {"verify", "all", "--catalog", "perturbed-cat-0.1", "--steps", "20000"};
    const auto a = run(base);
    auto with_threads = base;
    with_threads.insert(with_threads.end(), {"--threads", "1"});
    const auto b = run(with_threads);
    REQUIRE(!a.out.empty());
    CHECK(a.out == b.out);
    CHECK(a.code == b.code);

    auto reseeded = base;
    reseeded.insert(reseeded.end(), {"--seed", "7"});
    CHECK(run(reseeded).out != a.out);
}
