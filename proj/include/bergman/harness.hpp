#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bergman/integral_spec.hpp"

namespace bergman {

/// Optional overrides applied on top of every quadrature spec a suite uses.
struct QuadratureOverrides {
    std::optional<double> cutoff;
    std::optional<std::vector<double>> ladder;
    std::optional<int> density;
    std::optional<int> angular;
    std::optional<double> line_scale;
    std::optional<long long> node_budget;
    std::optional<double> tolerance;

    IntegralSpec apply(IntegralSpec spec) const;
    bool empty() const;
};

struct SuiteConfig {
    /// Canonical catalog name, e.g. "fr-suite".
    std::string suite;
    /// Cone descriptors in ConeDescriptor::parse syntax.
    std::vector<std::string> cones;
    /// Named parameter grids; keys must be known to the suite.
    std::map<std::string, std::vector<double>> grids;
    std::map<std::string, double> tolerances;
    QuadratureOverrides quadrature;
    std::string output;
    std::string format = "csv";
    std::uint64_t seed = 12345;
};

struct SuiteInfo {
    std::string name;
    std::string anchors;
    std::string description;
    std::vector<std::string> cones;
    std::map<std::string, std::vector<double>> grids;
    std::map<std::string, double> tolerances;
};

/// The eight suites with their anchors and default grids.
const std::vector<SuiteInfo>& list_suites();

/// Accepts "fr" or "fr-suite"; throws ConfigError for unknown names.
const SuiteInfo& find_suite(const std::string& name);

/// Catalog defaults for a suite.
SuiteConfig default_config(const std::string& suite);

/// Parses a JSON config on top of the defaults of `suite` (or of the "suite"
/// key when `suite` is empty). Unknown keys, wrong types and empty grids raise
/// ConfigError naming the field path; syntax errors name the line.
SuiteConfig parse_config(const std::string& text, const std::string& suite = "");
SuiteConfig load_config(const std::string& path, const std::string& suite = "");

/// One checked claim. A case passes against the oracle value; the
/// printed-printed value is recorded for comparison only.
struct CaseRecord {
    std::string id;
    std::string anchor;
    std::string cone;
    std::string inputs;
    std::string quantity;
    double computed = 0.0;
    double oracle = 0.0;
    std::optional<double> printed;
    double tolerance = 0.0;
    /// rel: |computed - oracle| <= tol |oracle|; abs: |computed - oracle| <= tol;
    /// le: computed <= oracle; ge: computed >= oracle; verdict: observed == expected.
    std::string comparison = "rel";
    std::string observed;
    std::string expected;
    bool pass = false;
    std::string note;

    bool operator==(const CaseRecord& other) const;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CaseRecord> cases;
    int passed = 0;
    int failed = 0;
    /// Wall time; kept out of exported files so reports stay byte-identical.
    double runtime_seconds = 0.0;

    bool operator==(const SuiteReport& other) const;
    int exit_status() const { return failed > 0 ? 1 : 0; }
};

/// Evaluates the pass flag of a numeric or verdict record.
bool evaluate_case(const CaseRecord& record);

SuiteReport run_suite(const SuiteConfig& config);

std::string report_csv(const SuiteReport& report);
std::string report_json(const SuiteReport& report);
SuiteReport parse_report_json(const std::string& text);

/// Writes the report through a temporary file and a rename.
void export_report(const SuiteReport& report, const std::string& format, const std::string& path);

} // namespace bergman
