#include "vodiag/report.hpp"

#include "vodiag/errors.hpp"
#include "vodiag/min_norm.hpp"
#include "vodiag/problem_io.hpp"

#include <cmath>

namespace vodiag {

Json to_json(const Eigen::VectorXd& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::isfinite(v[i]))
            arr.push_back(v[i]);
        else
            arr.push_back(v[i] > 0 ? "inf" : "-inf");
    }
    return arr;
}

Json report_header(const std::string& command, const Problem& problem, std::uint64_t seed) {
    Json j;
    j["tool"] = "vodiag";
    j["command"] = command;
    j["problem"] = render_problem(problem);
    j["problem_digest"] = problem_digest(problem);
    j["seed"] = seed;
    return j;
}

Json sample_record_json(const SampleRecord& rec) {
    Json j;
    j["x"] = to_json(rec.x);
    j["norm_x"] = rec.norm_x;
    j["f"] = to_json(rec.f);
    if (rec.shell >= 0) j["shell"] = rec.shell;
    if (std::isfinite(rec.nu)) j["nu"] = rec.nu;
    if (std::isfinite(rec.gamma)) j["gamma"] = rec.gamma;
    if (std::isfinite(rec.statistic)) j["statistic"] = rec.statistic;
    return j;
}

Json witness_table(const std::vector<SampleRecord>& rows, const ReportOptions& opts) {
    Json arr = Json::array();
    const std::size_t cap = opts.full ? rows.size()
                                      : std::min<std::size_t>(rows.size(),
                                                              static_cast<std::size_t>(opts.witness_cap));
    for (std::size_t i = 0; i < cap; ++i) arr.push_back(sample_record_json(rows[i]));
    return arr;
}

Json verdict_json(const Verdict& verdict, const ReportOptions& opts) {
    Json j;
    j["status"] = verdict.holds() ? "HoldsEvidence" : "FailsWithWitness";
    j["detail"] = verdict.detail;
    Json trend = Json::array();
    for (const auto& [radius, stat] : verdict.shell_summary) {
        Json row;
        row["radius"] = radius;
        if (std::isfinite(stat))
            row["statistic"] = stat;
        else
            row["statistic"] = "none";
        trend.push_back(std::move(row));
    }
    j["shell_trend"] = std::move(trend);
    j["witness_rows"] = static_cast<int>(verdict.witness.size());
    j["witness"] = witness_table(verdict.witness, opts);
    return j;
}

Json cloud_json(const AsymptoticCloud& cloud, const ReportOptions& opts) {
    Json j;
    j["candidate_count"] = static_cast<int>(cloud.candidates.size());
    Json cands = Json::array();
    for (const auto& c : cloud.candidates) {
        Json cj;
        cj["y"] = to_json(c.y);
        cj["best_residual"] = c.best_residual;
        cj["shell_span"] = c.shell_span;
        cj["max_shell"] = c.max_shell;
        cj["witness_rows"] = static_cast<int>(c.witness.size());
        cj["witness"] = witness_table(c.witness, opts);
        cands.push_back(std::move(cj));
    }
    j["candidates"] = std::move(cands);
    j["accepted_per_shell"] = cloud.accepted_per_shell;
    j["notes"] = cloud.notes;
    return j;
}

Json recession_json(const RecessionReport& report) {
    Json j;
    j["eq8_holds"] = report.eq8_holds;
    Json dirs = Json::array();
    for (const auto& d : report.directions) dirs.push_back(to_json(d));
    j["directions"] = std::move(dirs);
    if (report.witness) j["witness"] = to_json(*report.witness);
    return j;
}

Json crosscheck_json(const CrosscheckReport& report, const ReportOptions& opts) {
    Json j;
    j["verdicts"]["proper"] = report.proper_holds;
    j["verdicts"]["palais_smale_empty"] = report.ps_empty;
    j["verdicts"]["weak_palais_smale_empty"] = report.weak_ps_empty;
    j["verdicts"]["mtame_empty"] = report.mtame_empty;
    j["agree"] = report.agree;
    if (!report.agree)
        j["diagnostic"] = "verdicts disagree: either a tolerance artifact or a sampler gap; "
                          "inspect the per-probe sections";
    j["section"] = verdict_json(report.section, opts);
    j["proper"] = verdict_json(report.proper, opts);
    j["palais_smale"] = cloud_json(report.ps, opts);
    j["weak_palais_smale"] = cloud_json(report.weak_ps, opts);
    j["mtame"] = cloud_json(report.mtame, opts);
    return j;
}

Json existence_json(const ExistenceReport& report, const ReportOptions& opts) {
    Json j;
    j["summary"] = report.summary;
    j["necessary_refuted"] = report.necessary_refuted;
    j["sufficient_evidence"] = report.sufficient_evidence;
    j["recession"] = recession_json(report.recession);
    Json sections = Json::array();
    for (const auto& s : report.sections) {
        Json sj;
        sj["ybar"] = to_json(s.ybar);
        sj["section_bounded"] = s.section_bounded;
        sj["proper"] = s.proper;
        sections.push_back(std::move(sj));
    }
    j["sections"] = std::move(sections);
    Json inclusions = Json::array();
    for (const auto& c : report.inclusions) {
        Json cj;
        cj["cloud"] = c.cloud;
        cj["candidates"] = c.candidates;
        cj["matched_in_critical_cloud"] = c.matched;
        inclusions.push_back(std::move(cj));
    }
    j["critical_inclusions"] = std::move(inclusions);
    if (report.exhibited) {
        Json ej;
        ej["x"] = to_json(report.exhibited->x);
        ej["f"] = to_json(report.exhibited->f);
        ej["pareto"] = verdict_json(report.exhibited->pareto, opts);
        ej["trade_off_consistent"] = report.exhibited_consistent;
        if (report.exhibited_consistent) ej["trade_off_level"] = report.exhibited_M;
        j["exhibited_point"] = std::move(ej);
    }
    return j;
}

namespace {

Eigen::VectorXd vector_from_json(const Json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& e = arr[i];
        if (e.is_string())
            v[static_cast<Eigen::Index>(i)] = e.get<std::string>() == "inf"
                                                  ? std::numeric_limits<double>::infinity()
                                                  : -std::numeric_limits<double>::infinity();
        else
            v[static_cast<Eigen::Index>(i)] = e.get<double>();
    }
    return v;
}

void replay_rows(const Json& node, const Problem& problem, const RabierParams& params, double tol,
                 ReplayResult& result) {
    if (node.is_array()) {
        for (const auto& child : node) replay_rows(child, problem, params, tol, result);
        return;
    }
    if (!node.is_object()) return;
    if (node.contains("x") && node.contains("f") && node["x"].is_array()) {
        ++result.rows_checked;
        const Eigen::VectorXd x = vector_from_json(node["x"]);
        const Eigen::VectorXd f = vector_from_json(node["f"]);
        const Eigen::VectorXd f2 = problem.evaluate(x);
        if ((f - f2).lpNorm<Eigen::Infinity>() > tol)
            result.mismatches.push_back("row " + std::to_string(result.rows_checked) +
                                        ": f does not reproduce");
        if (node.contains("norm_x") && std::abs(node["norm_x"].get<double>() - x.norm()) > tol)
            result.mismatches.push_back("row " + std::to_string(result.rows_checked) +
                                        ": norm_x does not reproduce");
        if (node.contains("nu")) {
            const double nu = rabier_nu(problem, x, params);
            if (std::abs(nu - node["nu"].get<double>()) > tol)
                result.mismatches.push_back("row " + std::to_string(result.rows_checked) +
                                            ": nu does not reproduce");
        }
        if (node.contains("gamma")) {
            const double gamma = gamma_residual(problem, x, params);
            if (std::abs(gamma - node["gamma"].get<double>()) > tol)
                result.mismatches.push_back("row " + std::to_string(result.rows_checked) +
                                            ": gamma does not reproduce");
        }
        return;
    }
    for (const auto& [key, child] : node.items()) {
        (void)key;
        replay_rows(child, problem, params, tol, result);
    }
}

} // namespace

ReplayResult replay_report(const Json& report, double tol) {
    if (!report.contains("problem")) throw InputError("report carries no problem text");
    const Problem problem = parse_problem(report["problem"].get<std::string>());
    RabierParams params;
    if (report.contains("thresholds") && report["thresholds"].contains("mode"))
        params.mode = report["thresholds"]["mode"].get<std::string>() == "plus-only"
                          ? RabierMode::PlusOnly
                          : RabierMode::Full;
    ReplayResult result;
    replay_rows(report, problem, params, tol, result);
    return result;
}

} // namespace vodiag
