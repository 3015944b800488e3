#ifndef VODIAG_REPORT_HPP
#define VODIAG_REPORT_HPP

#include "vodiag/asymptotics.hpp"
#include "vodiag/efficiency.hpp"
#include "vodiag/problem.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace vodiag {

/// Reports use insertion-ordered JSON so identical runs serialize
/// byte-identically (the timing_ms field is the only run-dependent part).
using Json = nlohmann::ordered_json;

struct ReportOptions {
    /// Witness rows emitted per table unless full dumps are requested.
    int witness_cap = 50;
    bool full = false;
};

/// Common header: command echo, canonical problem text and digest, seed.
Json report_header(const std::string& command, const Problem& problem, std::uint64_t seed);

Json to_json(const Eigen::VectorXd& v);
Json sample_record_json(const SampleRecord& rec);
Json witness_table(const std::vector<SampleRecord>& rows, const ReportOptions& opts);
Json verdict_json(const Verdict& verdict, const ReportOptions& opts);
Json cloud_json(const AsymptoticCloud& cloud, const ReportOptions& opts);
Json recession_json(const RecessionReport& report);
Json crosscheck_json(const CrosscheckReport& report, const ReportOptions& opts);
Json existence_json(const ExistenceReport& report, const ReportOptions& opts);

struct ReplayResult {
    int rows_checked = 0;
    std::vector<std::string> mismatches;
    bool ok() const { return mismatches.empty(); }
};

/// Re-evaluates every witness row embedded in a report against the problem
/// text the report carries; recorded f, nu and gamma values must reproduce
/// within tol.
ReplayResult replay_report(const Json& report, double tol = 1e-10);

} // namespace vodiag

#endif
