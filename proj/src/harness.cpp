#include "bergman/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "bergman/errors.hpp"
#include "suite_impl.hpp"

namespace bergman {

using nlohmann::json;

IntegralSpec QuadratureOverrides::apply(IntegralSpec spec) const
{
    if (cutoff) spec.cutoff = *cutoff;
    if (ladder) spec.ladder = *ladder;
    if (density) spec.density = *density;
    if (angular) spec.angular = *angular;
    if (line_scale) spec.line_scale = *line_scale;
    if (node_budget) spec.node_budget = *node_budget;
    if (tolerance) spec.tolerance = *tolerance;
    return spec;
}

bool QuadratureOverrides::empty() const
{
    return !cutoff && !ladder && !density && !angular && !line_scale && !node_budget && !tolerance;
}

// ---------------------------------------------------------------------------
// Catalog

const std::vector<SuiteInfo>& list_suites()
{
    static const std::vector<SuiteInfo> catalog = detail::build_catalog();
    return catalog;
}

const SuiteInfo& find_suite(const std::string& name)
{
    for (const SuiteInfo& s : list_suites()) {
        if (s.name == name || s.name == name + "-suite") return s;
    }
    throw ConfigError("suite: unknown suite '" + name + "'");
}

SuiteConfig default_config(const std::string& suite)
{
    const SuiteInfo& info = find_suite(suite);
    SuiteConfig c;
    c.suite = info.name;
    c.cones = info.cones;
    c.grids = info.grids;
    c.tolerances = info.tolerances;
    return c;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& message)
{
    throw ConfigError(path + ": " + message);
}

double as_number(const json& j, const std::string& path)
{
    if (!j.is_number()) config_fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path)
{
    if (!j.is_number_integer()) config_fail(path, "expected an integer");
    return j.get<int>();
}

std::vector<double> as_numbers(const json& j, const std::string& path)
{
    if (!j.is_array()) config_fail(path, "expected an array of numbers");
    if (j.empty()) config_fail(path, "grid must be nonempty");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

const json& require_object(const json& j, const std::string& path)
{
    if (!j.is_object()) config_fail(path, "expected an object");
    return j;
}

void parse_quadrature(const json& j, QuadratureOverrides& q)
{
    for (const auto& [key, value] : require_object(j, "quadrature").items()) {
        const std::string path = "quadrature." + key;
        if (key == "cutoff") {
            q.cutoff = as_number(value, path);
        } else if (key == "ladder") {
            if (value.is_array() && value.empty()) {
                q.ladder = std::vector<double>{};
            } else {
                q.ladder = as_numbers(value, path);
            }
        } else if (key == "density") {
            q.density = as_int(value, path);
        } else if (key == "angular") {
            q.angular = as_int(value, path);
        } else if (key == "line_scale") {
            q.line_scale = as_number(value, path);
        } else if (key == "node_budget") {
            if (!value.is_number_integer()) config_fail(path, "expected an integer");
            q.node_budget = value.get<long long>();
        } else if (key == "tolerance") {
            q.tolerance = as_number(value, path);
        } else {
            config_fail(path, "unknown key");
        }
    }
}

int line_of(const std::string& text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

} // namespace

SuiteConfig parse_config(const std::string& text, const std::string& suite)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
    require_object(doc, "(root)");

    std::string name = suite;
    if (doc.contains("suite")) {
        if (!doc["suite"].is_string()) config_fail("suite", "expected a string");
        const std::string given = doc["suite"].get<std::string>();
        if (!name.empty() && find_suite(given).name != find_suite(name).name) {
            config_fail("suite", "config names '" + given + "' but '" + name + "' was requested");
        }
        name = given;
    }
    if (name.empty()) config_fail("suite", "missing suite name");
    SuiteConfig c = default_config(name);
    const SuiteInfo& info = find_suite(name);

    for (const auto& [key, value] : doc.items()) {
        if (key == "suite") continue;
        if (key == "cones") {
            if (!value.is_array() || value.empty()) config_fail("cones", "expected a nonempty array of strings");
            c.cones.clear();
            for (std::size_t i = 0; i < value.size(); ++i) {
                const std::string path = "cones[" + std::to_string(i) + "]";
                if (!value[i].is_string()) config_fail(path, "expected a string");
                const std::string cone = value[i].get<std::string>();
                try {
                    (void)ConeDescriptor::parse(cone);
                } catch (const Error& e) {
                    config_fail(path, e.what());
                }
                c.cones.push_back(cone);
            }
        } else if (key == "grids") {
            for (const auto& [g, v] : require_object(value, "grids").items()) {
                if (!info.grids.contains(g)) config_fail("grids." + g, "unknown grid for " + info.name);
                c.grids[g] = as_numbers(v, "grids." + g);
            }
        } else if (key == "tolerances") {
            for (const auto& [t, v] : require_object(value, "tolerances").items()) {
                if (!info.tolerances.contains(t)) config_fail("tolerances." + t, "unknown tolerance for " + info.name);
                c.tolerances[t] = as_number(v, "tolerances." + t);
            }
        } else if (key == "quadrature") {
            parse_quadrature(value, c.quadrature);
        } else if (key == "output") {
            for (const auto& [o, v] : require_object(value, "output").items()) {
                if (!v.is_string()) config_fail("output." + o, "expected a string");
                if (o == "path") {
                    c.output = v.get<std::string>();
                } else if (o == "format") {
                    c.format = v.get<std::string>();
                    if (c.format != "csv" && c.format != "json") config_fail("output.format", "expected csv or json");
                } else {
                    config_fail("output." + o, "unknown key");
                }
            }
        } else if (key == "seed") {
            if (!value.is_number_unsigned()) config_fail("seed", "expected a non-negative integer");
            c.seed = value.get<std::uint64_t>();
        } else {
            config_fail(key, "unknown key");
        }
    }
    return c;
}

SuiteConfig load_config(const std::string& path, const std::string& suite)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), suite);
}

// ---------------------------------------------------------------------------
// Records

namespace {

bool same_number(double a, double b)
{
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

} // namespace

bool CaseRecord::operator==(const CaseRecord& o) const
{
    const bool printed_equal = printed.has_value() == o.printed.has_value() && (!printed || same_number(*printed, *o.printed));
    return id == o.id && anchor == o.anchor && cone == o.cone && inputs == o.inputs && quantity == o.quantity &&
           same_number(computed, o.computed) && same_number(oracle, o.oracle) && printed_equal &&
           same_number(tolerance, o.tolerance) && comparison == o.comparison && observed == o.observed &&
           expected == o.expected && pass == o.pass && note == o.note;
}

bool SuiteReport::operator==(const SuiteReport& o) const
{
    return suite == o.suite && seed == o.seed && cases == o.cases && passed == o.passed && failed == o.failed;
}

bool evaluate_case(const CaseRecord& r)
{
    if (r.comparison == "verdict") return !r.observed.empty() && r.observed == r.expected;
    if (!std::isfinite(r.computed)) return false;
    if (r.comparison == "rel") return std::abs(r.computed - r.oracle) <= r.tolerance * std::abs(r.oracle);
    if (r.comparison == "abs") return std::abs(r.computed - r.oracle) <= r.tolerance;
    if (r.comparison == "le") return r.computed <= r.oracle + r.tolerance;
    if (r.comparison == "ge") return r.computed >= r.oracle - r.tolerance;
    return false;
}

// ---------------------------------------------------------------------------
// Export

namespace {

const std::vector<std::string> kColumns = {"suite",   "id",        "anchor",     "cone",     "inputs",
                                           "quantity", "computed", "oracle",     "paper_printed",
                                           "tolerance", "comparison", "observed", "expected", "pass", "note"};

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json number_json(double v)
{
    if (std::isfinite(v)) return v;
    return detail::format_number(v);
}

double number_from(const json& j)
{
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

std::string report_csv(const SuiteReport& report)
{
    std::string out;
    for (std::size_t i = 0; i < kColumns.size(); ++i) out += (i ? "," : "") + kColumns[i];
    out += '\n';
    for (const CaseRecord& r : report.cases) {
        const std::vector<std::string> row = {report.suite,
                                              r.id,
                                              r.anchor,
                                              r.cone,
                                              r.inputs,
                                              r.quantity,
                                              detail::format_number(r.computed),
                                              detail::format_number(r.oracle),
                                              r.printed ? detail::format_number(*r.printed) : "",
                                              detail::format_number(r.tolerance),
                                              r.comparison,
                                              r.observed,
                                              r.expected,
                                              r.pass ? "pass" : "fail",
                                              r.note};
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
        out += '\n';
    }
    return out;
}

std::string report_json(const SuiteReport& report)
{
    json cases = json::array();
    for (const CaseRecord& r : report.cases) {
        cases.push_back({{"id", r.id},
                         {"anchor", r.anchor},
                         {"cone", r.cone},
                         {"inputs", r.inputs},
                         {"quantity", r.quantity},
                         {"computed", number_json(r.computed)},
                         {"oracle", number_json(r.oracle)},
                         {"paper_printed", r.printed ? number_json(*r.printed) : json(nullptr)},
                         {"tolerance", number_json(r.tolerance)},
                         {"comparison", r.comparison},
                         {"observed", r.observed},
                         {"expected", r.expected},
                         {"pass", r.pass},
                         {"note", r.note}});
    }
    const json doc = {{"suite", report.suite},
                      {"seed", report.seed},
                      {"summary", {{"passed", report.passed}, {"failed", report.failed}}},
                      {"cases", cases}};
    return doc.dump(2) + "\n";
}

SuiteReport parse_report_json(const std::string& text)
{
    SuiteReport report;
    try {
        const json doc = json::parse(text);
        report.suite = doc.at("suite").get<std::string>();
        report.seed = doc.at("seed").get<std::uint64_t>();
        report.passed = doc.at("summary").at("passed").get<int>();
        report.failed = doc.at("summary").at("failed").get<int>();
        for (const json& c : doc.at("cases")) {
            CaseRecord r;
            r.id = c.at("id").get<std::string>();
            r.anchor = c.at("anchor").get<std::string>();
            r.cone = c.at("cone").get<std::string>();
            r.inputs = c.at("inputs").get<std::string>();
            r.quantity = c.at("quantity").get<std::string>();
            r.computed = number_from(c.at("computed"));
            r.oracle = number_from(c.at("oracle"));
            if (!c.at("paper_printed").is_null()) r.printed = number_from(c.at("paper_printed"));
            r.tolerance = number_from(c.at("tolerance"));
            r.comparison = c.at("comparison").get<std::string>();
            r.observed = c.at("observed").get<std::string>();
            r.expected = c.at("expected").get<std::string>();
            r.pass = c.at("pass").get<bool>();
            r.note = c.at("note").get<std::string>();
            report.cases.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report: ") + e.what());
    }
    return report;
}

void export_report(const SuiteReport& report, const std::string& format, const std::string& path)
{
    std::string body;
    if (format == "csv") {
        body = report_csv(report);
    } else if (format == "json") {
        body = report_json(report);
    } else {
        throw ConfigError("format: expected csv or json");
    }
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << body;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
    }
}

// ---------------------------------------------------------------------------
// Running

SuiteReport run_suite(const SuiteConfig& config)
{
    const SuiteInfo& info = find_suite(config.suite);
    for (const auto& [key, values] : config.grids) {
        if (values.empty()) throw ConfigError("grids." + key + ": grid must be nonempty");
    }
    const auto start = std::chrono::steady_clock::now();
    detail::CaseSink sink(config);
    const std::string& n = info.name;
    if (n == "fr-suite") {
        detail::run_fr(sink);
    } else if (n == "reproduce-suite") {
        detail::run_reproduce(sink);
    } else if (n == "lattice-suite") {
        detail::run_lattice(sink);
    } else if (n == "atomic-suite") {
        detail::run_atomic(sink);
    } else if (n == "operator-suite") {
        detail::run_operator(sink);
    } else if (n == "decompose-suite") {
        detail::run_decompose(sink);
    } else if (n == "wave-suite") {
        detail::run_wave(sink);
    } else {
        detail::run_range(sink);
    }
    SuiteReport report;
    report.suite = info.name;
    report.seed = config.seed;
    report.cases = sink.take();
    for (const CaseRecord& r : report.cases) (r.pass ? report.passed : report.failed) += 1;
    report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

// ---------------------------------------------------------------------------
// Sink and record helpers

namespace detail {

std::vector<double> CaseSink::grid(const std::string& key) const
{
    const auto it = config_.grids.find(key);
    if (it == config_.grids.end() || it->second.empty()) throw ConfigError("grids." + key + ": missing");
    return it->second;
}

double CaseSink::scalar(const std::string& key) const
{
    return grid(key).front();
}

double CaseSink::tolerance(const std::string& key) const
{
    const auto it = config_.tolerances.find(key);
    if (it == config_.tolerances.end()) throw ConfigError("tolerances." + key + ": missing");
    return it->second;
}

std::vector<ConeDescriptor> CaseSink::cones() const
{
    std::vector<ConeDescriptor> out;
    for (const std::string& c : config_.cones) out.push_back(ConeDescriptor::parse(c));
    return out;
}

void CaseSink::add(CaseRecord record)
{
    record.pass = evaluate_case(record);
    records_.push_back(std::move(record));
}

void CaseSink::guard(const CaseRecord& prototype, const std::vector<std::string>& ids,
                     const std::function<void()>& body)
{
    const std::size_t mark = records_.size();
    try {
        body();
    } catch (const std::exception& e) {
        for (const std::string& id : ids) {
            const bool present = std::any_of(records_.begin() + static_cast<std::ptrdiff_t>(mark), records_.end(),
                                             [&](const CaseRecord& r) { return r.id == id; });
            if (present) continue;
            CaseRecord r = prototype;
            r.id = id;
            r.computed = std::numeric_limits<double>::quiet_NaN();
            r.note = e.what();
            r.pass = false;
            records_.push_back(std::move(r));
        }
    }
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_inputs(const std::vector<std::pair<std::string, double>>& values)
{
    std::string out;
    for (const auto& [k, v] : values) {
        if (!out.empty()) out += ';';
        out += k + "=" + format_number(v);
    }
    return out;
}

CaseRecord numeric(std::string id, std::string anchor, const ConeDescriptor& cone, std::string inputs,
                   std::string quantity, double computed, double oracle, double tolerance, std::string comparison)
{
    CaseRecord r;
    r.id = std::move(id);
    r.anchor = std::move(anchor);
    r.cone = cone.name();
    r.inputs = std::move(inputs);
    r.quantity = std::move(quantity);
    r.computed = computed;
    r.oracle = oracle;
    r.tolerance = tolerance;
    r.comparison = std::move(comparison);
    return r;
}

CaseRecord verdict_case(std::string id, std::string anchor, const ConeDescriptor& cone, std::string inputs,
                        std::string quantity, std::string observed, std::string expected)
{
    CaseRecord r = numeric(std::move(id), std::move(anchor), cone, std::move(inputs), std::move(quantity),
                           std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 0.0,
                           "verdict");
    r.observed = std::move(observed);
    r.expected = std::move(expected);
    return r;
}

} // namespace detail

} // namespace bergman
