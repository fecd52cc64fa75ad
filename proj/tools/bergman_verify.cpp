#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bergman/errors.hpp"
#include "bergman/harness.hpp"
#include "bergman/parallel.hpp"
#include "bergman/tube.hpp"

namespace {

constexpr int kExitConfig = 2;

int run_verify(const std::string& suite, const std::string& config_path, const std::string& seed,
               const std::string& out, const std::string& format)
{
    bergman::SuiteConfig config =
        config_path.empty() ? bergman::default_config(suite) : bergman::load_config(config_path, suite);
    if (!seed.empty()) {
        try {
            std::size_t used = 0;
            config.seed = std::stoull(seed, &used);
            if (used != seed.size()) throw std::invalid_argument(seed);
        } catch (const std::exception&) {
            throw bergman::ConfigError("--seed: expected a non-negative integer");
        }
    }
    if (!out.empty()) config.output = out;
    if (!format.empty()) config.format = format;

    const bergman::SuiteReport report = bergman::run_suite(config);
    if (config.output.empty()) {
        std::cout << (config.format == "json" ? bergman::report_json(report) : bergman::report_csv(report));
    } else {
        bergman::export_report(report, config.format, config.output);
    }
    std::fprintf(stderr, "%s: %d passed, %d failed, %.1f s, %d workers\n", report.suite.c_str(), report.passed,
                 report.failed, report.runtime_seconds, bergman::worker_count());
    return report.exit_status();
}

void print_catalog()
{
    for (const bergman::SuiteInfo& s : bergman::list_suites()) {
        std::cout << s.name << "\n  anchors: " << s.anchors << "\n  " << s.description << "\n  cones:";
        for (const std::string& c : s.cones) std::cout << ' ' << c;
        std::cout << '\n';
        for (const auto& [key, values] : s.grids) {
            std::cout << "  grid " << key << ':';
            for (double v : values) std::cout << ' ' << v;
            std::cout << '\n';
        }
        for (const auto& [key, value] : s.tolerances) std::cout << "  tolerance " << key << ": " << value << '\n';
    }
}

void print_calibration(const std::string& cone_text, double nu)
{
    const bergman::ConeDescriptor cone = bergman::ConeDescriptor::parse(cone_text);
    const bergman::CalibratedConstant c = bergman::calibrate_constant(cone, nu, bergman::IntegralSpec{});
    const nlohmann::json record = {
        {"cone", cone.name()}, {"nu", c.nu}, {"value", c.value}, {"calibration_error", c.calibration_error}};
    std::cout << record.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical verification suites for weighted Bergman spaces on tube domains"};
    app.require_subcommand(1);

    std::string suite, config_path, seed, out, format;
    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite, "suite name, e.g. fr-suite")->required();
    verify->add_option("--config", config_path, "JSON suite configuration");
    verify->add_option("--seed", seed, "random seed override");
    verify->add_option("--out", out, "report path; stdout when absent");
    verify->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    app.add_subcommand("list", "list suites with anchors and default grids");

    std::string cone;
    double nu = 0.0;
    CLI::App* calibrate = app.add_subcommand("calibrate", "calibrate the kernel constant c_nu");
    calibrate->add_option("--cone", cone, "cone kind: halfline, lorentzN, spdN, product(...)")->required();
    calibrate->add_option("--nu", nu, "weight nu")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*verify) return run_verify(suite, config_path, seed, out, format);
        if (*calibrate) {
            print_calibration(cone, nu);
            return 0;
        }
        print_catalog();
        return 0;
    } catch (const bergman::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const bergman::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
