#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bergman/cone.hpp"
#include "bergman/harness.hpp"

namespace bergman::detail {

/// Collects records for one suite run. Each case body runs under a guard so
/// that a library error fails that case only.
class CaseSink {
public:
    explicit CaseSink(const SuiteConfig& config) : config_(config) {}

    const SuiteConfig& config() const { return config_; }
    std::vector<double> grid(const std::string& key) const;
    double scalar(const std::string& key) const;
    double tolerance(const std::string& key) const;
    IntegralSpec spec(IntegralSpec base) const { return config_.quadrature.apply(std::move(base)); }
    std::vector<ConeDescriptor> cones() const;

    void add(CaseRecord record);
    /// Runs body; on an exception every record in `ids` is added as failed.
    void guard(const CaseRecord& prototype, const std::vector<std::string>& ids, const std::function<void()>& body);

    std::vector<CaseRecord> take() { return std::move(records_); }

private:
    const SuiteConfig& config_;
    std::vector<CaseRecord> records_;
};

CaseRecord numeric(std::string id, std::string anchor, const ConeDescriptor& cone, std::string inputs,
                   std::string quantity, double computed, double oracle, double tolerance,
                   std::string comparison = "rel");
CaseRecord verdict_case(std::string id, std::string anchor, const ConeDescriptor& cone, std::string inputs,
                        std::string quantity, std::string observed, std::string expected);

/// "k=v;k=v" with shortest round-trip number formatting.
std::string format_inputs(const std::vector<std::pair<std::string, double>>& values);
std::string format_number(double v);

std::vector<SuiteInfo> build_catalog();

void run_fr(CaseSink& sink);
void run_reproduce(CaseSink& sink);
void run_lattice(CaseSink& sink);
void run_atomic(CaseSink& sink);
void run_operator(CaseSink& sink);
void run_decompose(CaseSink& sink);
void run_wave(CaseSink& sink);
void run_range(CaseSink& sink);

} // namespace bergman::detail
