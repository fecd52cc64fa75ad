// Acceptance run: one line per criterion, exit status 1 when any fails.
// Reports of every suite run are written to acceptance_reports/ in the
// working directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bergman/harness.hpp"

using namespace bergman;

namespace {

struct Timed {
    SuiteReport report;
    double seconds = 0.0;
};

const std::filesystem::path kReports = "acceptance_reports";

Timed run(const std::string& suite, const std::string& json, const std::string& tag)
{
    const SuiteConfig config = parse_config(json, suite);
    const auto t0 = std::chrono::steady_clock::now();
    Timed t{run_suite(config), 0.0};
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    export_report(t.report, "json", (kReports / (tag + ".json")).string());
    export_report(t.report, "csv", (kReports / (tag + ".csv")).string());
    std::fprintf(stderr, "  %s: %d passed, %d failed, %.1f s\n", tag.c_str(), t.report.passed, t.report.failed, t.seconds);
    return t;
}

using Filter = std::function<bool(const CaseRecord&)>;

// Counts matching cases and names the failures.
bool all_pass(const SuiteReport& r, const Filter& keep, int& count, std::string& failures)
{
    bool ok = true;
    for (const CaseRecord& c : r.cases) {
        if (!keep(c)) continue;
        ++count;
        if (!c.pass) {
            ok = false;
            failures += " " + c.cone + ":" + c.id;
        }
    }
    return ok;
}

bool is_verdict(const CaseRecord& c) { return c.comparison == "verdict"; }

int failed_criteria = 0;

void line(int k, bool ok, const std::string& title, const std::string& detail)
{
    if (!ok) ++failed_criteria;
    std::printf("CRITERION %d %s  %s: %s\n", k, ok ? "PASS" : "FAIL", title.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

const CaseRecord* find(const SuiteReport& r, const std::string& id)
{
    for (const CaseRecord& c : r.cases) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

} // namespace

int main()
{
    std::filesystem::create_directories(kReports);

    // 1 and 3 share the exponent suite runs.
    const Timed fr_h = run("fr", R"({"cones": ["halfline"]})", "fr_halfline");
    const Timed fr_l = run("fr", R"({"cones": ["lorentz3"], "grids": {"lambdas": [0.1, 0.31622776601683794, 1,
        3.1622776601683795, 10]}})", "fr_lorentz3");
    {
        int n = 0;
        std::string fails;
        bool ok = all_pass(fr_h.report, [](const CaseRecord& c) { return !is_verdict(c); }, n, fails);
        ok = all_pass(fr_l.report, [](const CaseRecord& c) { return !is_verdict(c); }, n, fails) && ok;
        bool typo_shown = true;
        std::string printed;
        for (const Timed* t : {&fr_h, &fr_l}) {
            for (const char* id : {"I_alpha.slope", "prop1.slope"}) {
                const CaseRecord* c = find(t->report, id);
                if (c == nullptr || !c->printed) {
                    typo_shown = false;
                    continue;
                }
                const bool differs = std::abs(*c->printed - c->computed) > c->tolerance * std::abs(c->oracle);
                typo_shown = typo_shown && differs;
                printed += " " + c->cone + ":" + c->id + fmt(" fit=%.4f oracle=%.4f printed=%.4f", c->computed,
                                                             c->oracle, *c->printed);
            }
        }
        const bool fast = fr_h.seconds <= 300.0 && fr_l.seconds <= 1800.0;
        line(1, ok && typo_shown && fast, "exponent fits",
             std::to_string(n) + " slope/r2 cases" + fails + fmt("; runtime %.0f s / %.0f s;", fr_h.seconds, fr_l.seconds) +
                 printed);
    }

    {
        const Timed rep = run("reproduce", "{}", "reproduce");
        int n = 0;
        std::string fails;
        const bool ok = all_pass(rep.report, [](const CaseRecord&) { return true; }, n, fails);
        const CaseRecord* cal = find(rep.report, "calibration");
        double worst = 0.0;
        for (const CaseRecord& c : rep.report.cases) {
            if (c.id != "calibration") worst = std::max(worst, c.computed);
        }
        line(2, ok && rep.seconds <= 60.0, "reproducing formula",
             std::to_string(n) + " cases" + fails +
                 fmt("; worst relative error %.2e; c_nu %.6f vs %.6f", worst, cal ? cal->computed : NAN,
                     cal ? cal->oracle : NAN) +
                 fmt("; runtime %.0f s", rep.seconds));
    }

    {
        int n = 0;
        std::string fails;
        bool ok = all_pass(fr_h.report, is_verdict, n, fails);
        ok = all_pass(fr_l.report, is_verdict, n, fails) && ok;
        line(3, ok && n > 0, "divergence boundaries", std::to_string(n) + " ladder verdicts" + fails);
    }

    {
        const Timed wave = run("wave", "{}", "wave");
        int n = 0;
        std::string fails;
        double worst = 0.0;
        for (const CaseRecord& c : wave.report.cases) worst = std::max(worst, c.computed);
        const bool ok = all_pass(wave.report, [](const CaseRecord&) { return true; }, n, fails);
        line(4, ok && n == 10, "wave operator", std::to_string(n) + " samples" + fails + fmt("; worst %.2e", worst));
    }

    const std::vector<std::pair<int, std::pair<std::string, std::string>>> plain = {
        {5, {"lattice", "lattice suite"}},
        {6, {"atomic", "atomic decomposition"}},
        {7, {"operator", "operator suite"}},
        {8, {"decompose", "decomposition check"}}};
    for (const auto& [k, names] : plain) {
        const Timed t = run(names.first, "{}", names.first);
        int n = 0;
        std::string fails;
        const bool ok = all_pass(t.report, [](const CaseRecord&) { return true; }, n, fails);
        line(k, ok && n > 0, names.second, std::to_string(n) + " cases" + fails + fmt("; runtime %.0f s", t.seconds));
    }

    {
        bool same = true;
        std::string detail;
        for (const char* suite : {"range", "wave", "reproduce"}) {
            const SuiteConfig config = parse_config(R"({"seed": 77})", suite);
            const SuiteReport a = run_suite(config), b = run_suite(config);
            const std::string pa = (kReports / (std::string("det_") + suite + "_a.csv")).string();
            const std::string pb = (kReports / (std::string("det_") + suite + "_b.csv")).string();
            export_report(a, "csv", pa);
            export_report(b, "csv", pb);
            const bool eq = report_csv(a) == report_csv(b) && report_json(a) == report_json(b) &&
                            slurp(pa) == slurp(pb);
            same = same && eq;
            detail += std::string(" ") + suite + (eq ? "=identical" : "=differs");
        }
        line(9, same, "determinism", "reruns with seed 77:" + detail);
    }

    std::printf("%d of 9 criteria failed\n", failed_criteria);
    return failed_criteria == 0 ? 0 : 1;
}
