#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/harness.hpp"

using namespace bergman;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string error_of(const std::string& text, const std::string& suite = "")
{
    try {
        (void)parse_config(text, suite);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

SuiteReport sample_report()
{
    SuiteReport r;
    r.suite = "fr-suite";
    r.seed = 9;
    CaseRecord a;
    a.id = "I_alpha.slope";
    a.anchor = "Lemma 5 / I_alpha";
    a.cone = "halfline";
    a.inputs = "alpha=2.5;points=7";
    a.quantity = "log-log slope";
    a.computed = -1.5000000001;
    a.oracle = -1.5;
    a.printed = 3.5;
    a.tolerance = 0.02;
    a.pass = evaluate_case(a);
    CaseRecord b;
    b.id = "edge";
    b.anchor = "Proposition 1, \"quoted\"";
    b.cone = "lorentz3";
    b.comparison = "verdict";
    b.computed = std::numeric_limits<double>::infinity();
    b.oracle = std::numeric_limits<double>::quiet_NaN();
    b.observed = "Diverged";
    b.expected = "Diverged";
    b.pass = evaluate_case(b);
    r.cases = {a, b};
    r.passed = 2;
    return r;
}

} // namespace

TEST_CASE("catalog")
{
    const auto& c = list_suites();
    CHECK(c.size() == 8);
    std::set<std::string> names;
    for (const SuiteInfo& s : c) {
        names.insert(s.name);
        CHECK_FALSE(s.anchors.empty());
        CHECK_FALSE(s.grids.empty());
        CHECK_FALSE(s.cones.empty());
        for (const auto& [k, v] : s.grids) CHECK_FALSE(v.empty());
    }
    CHECK(names.contains("fr-suite"));
    CHECK(names.size() == 8);
    CHECK(find_suite("fr").name == "fr-suite");
    CHECK_THROWS_AS(find_suite("nope"), ConfigError);
}

TEST_CASE("config parsing is strict and names the field")
{
    const SuiteConfig c = parse_config(R"({"suite": "fr", "cones": ["lorentz3"], "seed": 4,
        "grids": {"lambdas": [1, 3, 10, 30, 100]}, "tolerances": {"slope_other": 0.1},
        "quadrature": {"density": 3, "ladder": []}, "output": {"path": "x.json", "format": "json"}})");
    CHECK(c.suite == "fr-suite");
    CHECK(c.cones == std::vector<std::string>{"lorentz3"});
    CHECK(c.seed == 4);
    CHECK(c.grids.at("lambdas").size() == 5);
    CHECK(c.grids.at("p_divergence").size() == 2);
    CHECK(c.tolerances.at("slope_other") == 0.1);
    CHECK(c.quadrature.density == 3);
    CHECK(c.quadrature.ladder->empty());
    CHECK(c.output == "x.json");
    CHECK(c.format == "json");
    CHECK(c.quadrature.apply(IntegralSpec{}).density == 3);

    CHECK(error_of(R"({"suite": "fr", "colors": 1})").starts_with("colors: unknown key"));
    CHECK(error_of(R"({"suite": "fr", "grids": {"lambda": [1]}})").starts_with("grids.lambda:"));
    CHECK(error_of(R"({"suite": "fr", "grids": {"lambdas": []}})").find("nonempty") != std::string::npos);
    CHECK(error_of(R"({"suite": "fr", "grids": {"lambdas": [1, "a"]}})").starts_with("grids.lambdas[1]:"));
    CHECK(error_of(R"({"suite": "fr", "quadrature": {"densty": 3}})").starts_with("quadrature.densty:"));
    CHECK(error_of(R"({"suite": "fr", "cones": ["cube"]})").starts_with("cones[0]:"));
    CHECK(error_of(R"({"suite": "fr", "seed": -1})").starts_with("seed:"));
    CHECK(error_of(R"({"cones": ["halfline"]})").starts_with("suite:"));
    CHECK(error_of(R"({"suite": "wave"})", "fr").starts_with("suite:"));
    CHECK(error_of("{\n\"suite\": \"fr\",\n\"seed\": 1,,\n}").starts_with("line 3:"));
    CHECK(error_of(R"({})", "range").empty());
}

TEST_CASE("case evaluation")
{
    CaseRecord r;
    r.computed = 1.01;
    r.oracle = 1.0;
    r.tolerance = 0.02;
    CHECK(evaluate_case(r));
    r.tolerance = 0.005;
    CHECK_FALSE(evaluate_case(r));
    r.comparison = "le";
    r.oracle = 2.0;
    CHECK(evaluate_case(r));
    r.computed = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(evaluate_case(r));
    r.comparison = "verdict";
    r.observed = "Diverged";
    r.expected = "Converged";
    CHECK_FALSE(evaluate_case(r));
}

TEST_CASE("report export")
{
    SuiteReport empty;
    empty.suite = "range-suite";
    const std::string header = report_csv(empty);
    CHECK(std::count(header.begin(), header.end(), '\n') == 1);
    CHECK(header.find("oracle,paper_printed") != std::string::npos);

    const SuiteReport r = sample_report();
    const std::string csv = report_csv(r);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("\"Proposition 1, \"\"quoted\"\"\"") != std::string::npos);
    CHECK(csv.find(",-1.5,3.5,") != std::string::npos);

    const SuiteReport back = parse_report_json(report_json(r));
    CHECK(back == r);
    CHECK(std::isinf(back.cases[1].computed));
    CHECK_FALSE(back.cases[1].printed.has_value());
    CHECK(report_json(back) == report_json(r));

    const auto dir = std::filesystem::temp_directory_path() / "bergman_harness_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "report.json").string();
    export_report(r, "json", path);
    CHECK(read_file(path) == report_json(r));
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    CHECK_THROWS_AS(export_report(r, "xml", path), ConfigError);
    CHECK_THROWS_AS(export_report(r, "csv", (dir / "missing" / "r.csv").string()), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("suite runs: pass path, failure path, determinism")
{
    const SuiteReport range = run_suite(default_config("range"));
    CHECK(range.failed == 0);
    CHECK(range.passed == static_cast<int>(range.cases.size()));
    CHECK(range.exit_status() == 0);
    for (const CaseRecord& c : range.cases) CHECK_FALSE(c.anchor.empty());

    SuiteConfig wave = default_config("wave");
    wave.seed = 3;
    const SuiteReport w1 = run_suite(wave), w2 = run_suite(wave);
    CHECK(w1.failed == 0);
    CHECK(report_csv(w1) == report_csv(w2));
    CHECK(report_json(w1) == report_json(w2));
    wave.seed = 4;
    CHECK(report_csv(run_suite(wave)) != report_csv(w1));

    SuiteConfig broke = parse_config(R"({"quadrature": {"node_budget": 0}, "grids": {"points": [3]}})", "reproduce");
    const SuiteReport f = run_suite(broke);
    CHECK(f.cases.size() == 4);
    CHECK(f.passed == 0);
    CHECK(f.exit_status() != 0);
}
