#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using mcagg::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n' ? 1 : 0;
    return n;
}

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("mcagg_cli_" + name); }

std::string circles_csv(std::size_t per_ring) {
    const fs::path p = tmp("circles_" + std::to_string(per_ring) + ".csv");
    REQUIRE(call({"generate", "--n-per-circle", std::to_string(per_ring), "--out", p.string()}).code == 0);
    return p.string();
}

const std::string iris = std::string(MCAGG_DATA_DIR) + "/iris.csv";

}  // namespace

TEST_CASE("generate defaults write 180 points") {
    const Result r = call({"generate"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 181);
    CHECK(r.out == call({"generate"}).out);
    CHECK(r.out != call({"generate", "--seed", "3"}).out);
}

TEST_CASE("cluster emits a JSON result") {
    const std::string data = circles_csv(15);
    const Result r = call({"cluster", "--data", data, "--label-col", "class", "--runs", "3", "--delta", "0.25"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["assignments"].size() == 45);
    for (const char* key : {"cost", "cost_terms", "violations", "config", "stage_trace", "nmi", "nmi_mean"})
        CHECK(j.contains(key));
    CHECK(j["nmi_mean"].get<double>() >= 0.0);
    CHECK(j["config"]["seed"].is_number());

    const Result csv = call({"cluster", "--data", data, "--label-col", "class", "--runs", "1", "--format", "csv"});
    CHECK(csv.code == 0);
    CHECK(count_lines(csv.out) == 46);
}

TEST_CASE("cluster honours a constraint file") {
    const std::string data = circles_csv(15);
    const fs::path c = tmp("feasible.txt");
    std::ofstream(c) << "ML 0 20\nCL 0 1\nML 1 44\n";
    const Result r = call({"cluster", "--data", data, "--label-col", "class", "--constraints", c.string(), "--K", "3",
                           "--runs", "2"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto a = j["assignments"];
    CHECK(a[0] == a[20]);
    CHECK(a[1] == a[44]);
    CHECK(a[0] != a[1]);
    CHECK(j["violations"]["must"] == 0);
    CHECK(j["violations"]["cannot"] == 0);
}

TEST_CASE("contradictory constraints exit with code 1") {
    const std::string data = circles_csv(15);
    const fs::path c = tmp("contra.txt");
    std::ofstream(c) << "ML 0 1\nML 1 2\nCL 0 2\n";
    const Result r = call({"cluster", "--data", data, "--label-col", "class", "--constraints", c.string(), "--K", "3"});
    CHECK(r.code == 1);
    CHECK(r.err.find("clique") != std::string::npos);
}

TEST_CASE("input errors exit with code 1") {
    CHECK(call({"cluster", "--data", "/nonexistent.csv", "--K", "2"}).code == 1);
    CHECK(call({"cluster", "--data", iris, "--label-col", "class", "--beta", "3"}).code == 1);
    CHECK(call({"bogus"}).code == 1);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("result config reproduces the run") {
    const std::string data = circles_csv(15);
    const fs::path first = tmp("first.json");
    REQUIRE(call({"cluster", "--data", data, "--label-col", "class", "--runs", "2", "--seed", "9", "--k", "8",
                  "--beta", "0.4", "--fraction", "0.2", "--out", first.string()})
                .code == 0);
    const Result again = call({"cluster", "--data", data, "--label-col", "class", "--config", first.string()});
    REQUIRE(again.code == 0);
    std::ifstream in(first);
    const auto a = nlohmann::json::parse(in);
    const auto b = nlohmann::json::parse(again.out);
    CHECK(a["assignments"] == b["assignments"]);
    CHECK(a["cost"] == b["cost"]);
    CHECK(a["config"] == b["config"]);
}

TEST_CASE("constraints subcommand") {
    const Result none = call({"constraints", "--data", iris, "--label-col", "class", "--fraction", "0"});
    CHECK(none.code == 0);
    CHECK(none.out.empty());
    const Result some = call({"constraints", "--data", iris, "--label-col", "class", "--fraction", "0.1",
                              "--seed", "4"});
    CHECK(some.code == 0);
    CHECK(count_lines(some.out) == 15 * 14 / 2);
    CHECK(some.out == call({"constraints", "--data", iris, "--label-col", "class", "--fraction", "0.1",
                            "--seed", "4"})
                          .out);
}

TEST_CASE("single-value sweep matches cluster") {
    const std::string data = circles_csv(15);
    const Result c = call({"cluster", "--data", data, "--label-col", "class", "--runs", "3", "--beta", "0.6"});
    const Result s = call({"sweep", "--data", data, "--label-col", "class", "--runs", "3", "--axis", "beta",
                           "--grid", "0.6", "--format", "json"});
    REQUIRE(c.code == 0);
    REQUIRE(s.code == 0);
    const auto jc = nlohmann::json::parse(c.out);
    const auto js = nlohmann::json::parse(s.out);
    CHECK(jc["nmi_mean"].get<double>() == js["rows"][0]["nmi_mean"].get<double>());

    const Result csv = call({"sweep", "--data", data, "--label-col", "class", "--runs", "3", "--axis", "beta",
                             "--grid", "0.6,1"});
    CHECK(csv.code == 0);
    CHECK(count_lines(csv.out) == 1 + 2 * 4);
}
