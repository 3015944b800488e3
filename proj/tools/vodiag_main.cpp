// Command line front end: parses problem files, runs the diagnostics and
// prints machine-readable JSON reports. Exit codes: 0 = verdict produced
// (including failing verdicts), 1 = usage/parse error, 2 = numerical failure.

#include "vodiag/asymptotics.hpp"
#include "vodiag/efficiency.hpp"
#include "vodiag/errors.hpp"
#include "vodiag/min_norm.hpp"
#include "vodiag/oracle.hpp"
#include "vodiag/problem_io.hpp"
#include "vodiag/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using vodiag::Json;

struct CommonOpts {
    std::string problem_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int threads = 1;
    bool full = false;
    std::string mode = "full";
    std::string radii = "1,2,20";
    int samples_per_shell = 256;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw vodiag::InputError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<double> parse_csv_doubles(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "inf" || item == "+inf") {
            out.push_back(std::numeric_limits<double>::infinity());
        } else if (item == "-inf") {
            out.push_back(-std::numeric_limits<double>::infinity());
        } else {
            char* end = nullptr;
            const double v = std::strtod(item.c_str(), &end);
            while (end && *end == ' ') ++end;
            if (!end || *end != '\0')
                throw vodiag::InputError(std::string("malformed ") + what + ": '" + item + "'");
            out.push_back(v);
        }
    }
    if (out.empty()) throw vodiag::InputError(std::string("empty ") + what);
    return out;
}

Eigen::VectorXd parse_point(const std::string& text, int n, const char* what) {
    const auto vals = parse_csv_doubles(text, what);
    if (static_cast<int>(vals.size()) != n)
        throw vodiag::InputError(std::string(what) + " needs " + std::to_string(n) + " entries");
    return Eigen::Map<const Eigen::VectorXd>(vals.data(), n);
}

vodiag::SublevelBound parse_ybar(const std::string& text, int m) {
    if (text == "inf" || text == "+inf") return vodiag::SublevelBound::unrestricted(m);
    const auto vals = parse_csv_doubles(text, "ybar");
    if (static_cast<int>(vals.size()) != m)
        throw vodiag::InputError("ybar needs " + std::to_string(m) + " entries (or the single word inf)");
    return vodiag::SublevelBound(Eigen::Map<const Eigen::VectorXd>(vals.data(), m));
}

void parse_box(const std::string& text, int n, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
    const auto vals = parse_csv_doubles(text, "box");
    lo.resize(n);
    hi.resize(n);
    if (static_cast<int>(vals.size()) == 2) {
        lo.setConstant(vals[0]);
        hi.setConstant(vals[1]);
    } else if (static_cast<int>(vals.size()) == 2 * n) {
        for (int i = 0; i < n; ++i) {
            lo[i] = vals[static_cast<std::size_t>(2 * i)];
            hi[i] = vals[static_cast<std::size_t>(2 * i + 1)];
        }
    } else {
        throw vodiag::InputError("box needs 2 values (applied to every coordinate) or 2n values");
    }
}

vodiag::RadiusSchedule parse_schedule(const CommonOpts& opts) {
    const auto vals = parse_csv_doubles(opts.radii, "radii");
    if (vals.size() != 3) throw vodiag::InputError("radii expects R0,rho,K");
    return vodiag::RadiusSchedule::geometric(vals[0], vals[1], static_cast<int>(vals[2]),
                                             opts.samples_per_shell);
}

vodiag::RabierMode parse_mode(const std::string& mode) {
    if (mode == "full") return vodiag::RabierMode::Full;
    if (mode == "plus-only") return vodiag::RabierMode::PlusOnly;
    throw vodiag::InputError("mode must be full or plus-only");
}

int default_threads() {
    if (const char* env = std::getenv("VODIAG_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_schedule = true) {
    cmd->add_option("--problem", opts.problem_path, "problem file")->required();
    cmd->add_option("--out", opts.out_path, "write the report to this file instead of stdout");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--threads", opts.threads, "worker threads (default: VODIAG_THREADS or 1)");
    cmd->add_option("--mode", opts.mode, "subgradient branches: full | plus-only");
    cmd->add_flag("--full", opts.full, "emit complete witness tables");
    if (with_schedule) {
        cmd->add_option("--radii", opts.radii, "geometric shell schedule R0,rho,K (default 1,2,20)");
        cmd->add_option("--samples-per-shell", opts.samples_per_shell, "sample budget per shell");
    }
}

void emit(const CommonOpts& opts, Json report, std::chrono::steady_clock::time_point started) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    report["timing_ms"] = elapsed;
    const std::string text = report.dump(2) + "\n";
    if (opts.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opts.out_path);
        if (!out) throw vodiag::InputError("cannot write file: " + opts.out_path);
        out << text;
    }
}

Json thresholds_json(const vodiag::ProbeParams& p) {
    Json j;
    j["mode"] = p.mode == vodiag::RabierMode::Full ? "full" : "plus-only";
    j["tau_abs"] = p.tau_abs;
    j["ps_exponent"] = p.ps_exponent;
    j["gamma_tol"] = p.gamma_tol;
    j["crit_tol"] = p.crit_tol;
    j["cluster_radius"] = p.cluster_radius;
    j["divergence_threshold"] = p.divergence_threshold;
    j["bound_cap_factor"] = p.bound_cap_factor;
    j["min_persist_shells"] = p.min_persist_shells;
    return j;
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) s += ' ';
        s += argv[i];
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"diagnostics for constrained nonsmooth vector optimization"};
    app.require_subcommand(1);
    const std::string command_echo = join_args(argc, argv);
    const auto started = std::chrono::steady_clock::now();

    CommonOpts opts;
    opts.threads = default_threads();

    // rabier
    auto* rabier_cmd = app.add_subcommand("rabier", "extended Rabier function at a point");
    std::string at_text;
    double rabier_tol = 1e-9;
    add_common(rabier_cmd, opts, false);
    rabier_cmd->add_option("--at", at_text, "evaluation point x1,...,xn")->required();
    rabier_cmd->add_option("--tol", rabier_tol, "certificate tolerance");

    // probe <kind>
    auto* probe_cmd = app.add_subcommand("probe", "asymptotic condition probes");
    std::string probe_kind;
    std::string ybar_text = "inf";
    probe_cmd->add_option("kind", probe_kind, "proper | section | ps | weak-ps | mtame")->required();
    add_common(probe_cmd, opts);
    probe_cmd->add_option("--ybar", ybar_text, "sublevel bound y1,...,ym or inf")->required();

    // kzero
    auto* kzero_cmd = app.add_subcommand("kzero", "critical-value cloud inside a search box");
    std::string kzero_ybar = "inf", kzero_box;
    int seeds_per_dim = 33;
    add_common(kzero_cmd, opts, false);
    kzero_cmd->add_option("--ybar", kzero_ybar, "sublevel bound")->required();
    kzero_cmd->add_option("--box", kzero_box, "search box lo,hi or l1,u1,...")->required();
    kzero_cmd->add_option("--seeds-per-dim", seeds_per_dim, "seed grid resolution");

    // crosscheck
    auto* cross_cmd = app.add_subcommand("crosscheck", "four-way equivalence consistency table");
    std::string cross_ybar;
    add_common(cross_cmd, opts);
    cross_cmd->add_option("--ybar", cross_ybar, "finite sublevel bound")->required();

    // pareto solve / front
    auto* pareto_cmd = app.add_subcommand("pareto", "scalarization solvers");
    pareto_cmd->require_subcommand(1);
    auto* solve_cmd = pareto_cmd->add_subcommand("solve", "single weighted scalarization");
    std::string lambda_text, solve_ybar, solve_box;
    int starts = 64;
    double grid_step = 1e-3;
    add_common(solve_cmd, opts, false);
    solve_cmd->add_option("--lambda", lambda_text, "strictly positive weights l1,...,lm")->required();
    solve_cmd->add_option("--ybar", solve_ybar, "sublevel bound")->required();
    solve_cmd->add_option("--box", solve_box, "search box")->required();
    solve_cmd->add_option("--starts", starts, "multi-start count");
    solve_cmd->add_option("--grid-step", grid_step, "verification grid step");

    auto* front_cmd = pareto_cmd->add_subcommand("front", "weight sweep");
    std::string front_ybar, front_box;
    int lambda_grid_count = 8;
    add_common(front_cmd, opts, false);
    front_cmd->add_option("--ybar", front_ybar, "sublevel bound")->required();
    front_cmd->add_option("--box", front_box, "search box")->required();
    front_cmd->add_option("--lambda-grid", lambda_grid_count, "number of weight vectors");
    front_cmd->add_option("--starts", starts, "multi-start count per weight");
    front_cmd->add_option("--grid-step", grid_step, "verification grid step");

    // geoffrion
    auto* geoff_cmd = app.add_subcommand("geoffrion", "bounded trade-off check at a point");
    std::string xbar_text, geoff_box;
    double level_m = 10.0;
    double geoff_step = 1e-2;
    double geoff_tol = 1e-9;
    add_common(geoff_cmd, opts, false);
    geoff_cmd->add_option("--xbar", xbar_text, "tested point")->required();
    geoff_cmd->add_option("--M", level_m, "trade-off level")->required();
    geoff_cmd->add_option("--box", geoff_box, "sample box")->required();
    geoff_cmd->add_option("--grid-step", geoff_step, "sample grid step");
    geoff_cmd->add_option("--tol", geoff_tol, "strict-improvement margin");

    // recession
    auto* rec_cmd = app.add_subcommand("recession", "image recession directions and the cone test");
    add_common(rec_cmd, opts);

    // existence
    auto* exist_cmd = app.add_subcommand("existence", "composite existence evidence report");
    std::string exist_box;
    add_common(exist_cmd, opts);
    exist_cmd->add_option("--box", exist_box, "search box for the critical cloud");

    // oracle pareto-grid
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force ground truth");
    auto* grid_cmd = oracle_cmd->add_subcommand("pareto-grid", "exhaustive nondominated grid subset");
    std::string oracle_box;
    double oracle_step = 1e-2;
    add_common(grid_cmd, opts, false);
    grid_cmd->add_option("--box", oracle_box, "grid box")->required();
    grid_cmd->add_option("--grid-step", oracle_step, "grid step")->required();

    // replay
    auto* replay_cmd = app.add_subcommand("replay", "re-verify the witness rows of a report");
    std::string report_path;
    double replay_tol = 1e-10;
    replay_cmd->add_option("--report", report_path, "report JSON file")->required();
    replay_cmd->add_option("--tol", replay_tol, "reproduction tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        vodiag::ReportOptions ropts;
        ropts.full = opts.full;

        if (replay_cmd->parsed()) {
            const Json report = Json::parse(read_file(report_path));
            const auto result = vodiag::replay_report(report, replay_tol);
            Json out;
            out["tool"] = "vodiag";
            out["command"] = command_echo;
            out["rows_checked"] = result.rows_checked;
            out["ok"] = result.ok();
            out["mismatches"] = result.mismatches;
            std::cout << out.dump(2) << "\n";
            return result.ok() ? 0 : 2;
        }

        const vodiag::Problem problem = vodiag::parse_problem(read_file(opts.problem_path));
        vodiag::ProbeParams params;
        params.mode = parse_mode(opts.mode);
        params.threads = opts.threads;

        if (rabier_cmd->parsed()) {
            const Eigen::VectorXd x = parse_point(at_text, problem.n(), "--at");
            vodiag::RabierParams rp;
            rp.mode = params.mode;
            rp.tol = rabier_tol;
            const auto detail = vodiag::rabier_nu_detail(problem, x, rp);
            Json report = vodiag::report_header(command_echo, problem, opts.seed);
            report["thresholds"]["mode"] = opts.mode;
            report["thresholds"]["tol"] = rabier_tol;
            report["at"] = vodiag::to_json(x);
            report["nu"] = detail.value;
            report["pattern"] = detail.pattern;
            report["lambda"] = vodiag::to_json(detail.lambda);
            report["point"] = vodiag::to_json(detail.point);
            report["cone_coeffs"] = vodiag::to_json(detail.cone_coeffs);
            emit(opts, std::move(report), started);
            return 0;
        }

        if (probe_cmd->parsed()) {
            const auto schedule = parse_schedule(opts);
            const auto ybar = parse_ybar(ybar_text, problem.m());
            Json report = vodiag::report_header(command_echo, problem, opts.seed);
            report["thresholds"] = thresholds_json(params);
            report["probe"] = probe_kind;
            if (probe_kind == "proper") {
                report["result"] =
                    vodiag::verdict_json(vodiag::properness_probe(problem, ybar, schedule, opts.seed, params), ropts);
            } else if (probe_kind == "section") {
                report["result"] = vodiag::verdict_json(
                    vodiag::bounded_section_probe(problem, ybar, schedule, opts.seed, params), ropts);
            } else if (probe_kind == "ps") {
                report["result"] =
                    vodiag::cloud_json(vodiag::ps_probe(problem, ybar, schedule, opts.seed, params), ropts);
            } else if (probe_kind == "weak-ps") {
                report["result"] =
                    vodiag::cloud_json(vodiag::weak_ps_probe(problem, ybar, schedule, opts.seed, params), ropts);
            } else if (probe_kind == "mtame") {
                report["result"] =
                    vodiag::cloud_json(vodiag::mtame_probe(problem, ybar, schedule, opts.seed, params), ropts);
            } else {
                throw vodiag::InputError("probe kind must be proper, section, ps, weak-ps or mtame");
            }
            emit(opts, std::move(report), started);
            return 0;
        }

        if (kzero_cmd->parsed()) {
            const auto ybar = parse_ybar(kzero_ybar, problem.m());
            Eigen::VectorXd lo, hi;
            parse_box(kzero_box, problem.n(), lo, hi);
            Json report = vodiag::report_header(command_echo, problem, opts.seed);
            report["thresholds"] = thresholds_json(params);
            report["result"] =
                vodiag::cloud_json(vodiag::k_zero_cloud(problem, ybar, lo, hi, seeds_per_dim, params), ropts);
            emit(opts, std::move(report), started);
            return 0;
        }

        if (cross_cmd->parsed()) {
            const auto schedule = parse_schedule(opts);
            const auto ybar = parse_ybar(cross_ybar, problem.m());
            const auto rep = vodiag::equivalence_crosscheck(problem, ybar, schedule, opts.seed, params);
            Json report = vodiag::report_header(command_echo, problem, opts.seed);
            report["thresholds"] = thresholds_json(params);
            report["result"] = vodiag::crosscheck_json(rep, ropts);
            emit(opts, std::move(report), started);
            return 0;
        }

        if (solve_cmd->parsed() || front_cmd->parsed()) {
            const bool solving = solve_cmd->parsed();
            const auto ybar = parse_ybar(solving ? solve_ybar : front_ybar, problem.m());
            Eigen::VectorXd lo, hi;
            parse_box(solving ? solve_box : front_box, problem.n(), lo, hi);
            vodiag::ScalarizationConfig config(Eigen::VectorXd::Ones(problem.m()), ybar, lo, hi);
            config.starts = starts;
            config.grid_step = grid_step;
            config.seed = opts.seed;
            config.threads = opts.threads;

            Json report = vodiag::report_header(command_echo, problem, opts.seed);
            report["thresholds"]["grid_step"] = grid_step;
            report["thresholds"]["tol"] = config.tol;
            if (solving) {
                config.lambda = parse_point(lambda_text, problem.m(), "--lambda");
                const auto res = vodiag::scalarize_solve(problem, config);
                report["lambda"] = vodiag::to_json(config.lambda);
                report["x"] = vodiag::to_json(res.x);
                report["f"] = vodiag::to_json(res.f);
                report["objective"] = res.objective;
                report["pareto"] = vodiag::verdict_json(res.pareto, ropts);
            } else {
                std::vector<Eigen::VectorXd> lambda_grid;
                const int m = problem.m();
                std::mt19937_64 rng(opts.seed + 7);
                std::uniform_real_distribution<double> unif(0.05, 1.0);
                for (int k = 0; k < lambda_grid_count; ++k) {
                    Eigen::VectorXd lambda(m);
                    if (m == 2) {
                        const double t = (k + 1.0) / (lambda_grid_count + 1.0);
                        lambda << t, 1.0 - t;
                    } else {
                        for (int i = 0; i < m; ++i) lambda[i] = unif(rng);
                        lambda /= lambda.sum();
                    }
                    lambda_grid.push_back(std::move(lambda));
                }
                const auto front = vodiag::pareto_front(problem, lambda_grid, config);
                Json entries = Json::array();
                for (const auto& e : front.entries) {
                    Json ej;
                    ej["lambda"] = vodiag::to_json(e.lambda);
                    ej["x"] = vodiag::to_json(e.x);
                    ej["f"] = vodiag::to_json(e.f);
                    entries.push_back(std::move(ej));
                }
                report["front"] = std::move(entries);
                report["failures"] = front.failures;
            }
            emit(opts, std::move(report), started);
            return 0;
        }

        if (geoff_cmd->parsed()) {
            const Eigen::VectorXd xbar = parse_point(xbar_text, problem.n(), "--xbar");
            Eigen::VectorXd lo, hi;
            parse_box(geoff_box, problem.n(), lo, hi);
            const auto spec = vodiag::GridSpec::from_step(lo, hi, geoff_step);
            const auto samples = vodiag::feasible_grid_points(problem, spec, geoff_tol);
            const auto rep = vodiag::geoffrion_check(problem, xbar, level_m, samples, geoff_tol);
            Json report = vodiag::report_header(command_echo, problem, opts.seed);
            report["thresholds"]["M"] = level_m;
            report["thresholds"]["grid_step"] = geoff_step;
            report["thresholds"]["tol"] = geoff_tol;
            report["xbar"] = vodiag::to_json(xbar);
            if (rep.consistent) {
                report["status"] = "ConsistentUpTo";
                report["M"] = rep.M;
            } else {
                report["status"] = "Violation";
                report["M"] = rep.M;
                report["x"] = vodiag::to_json(rep.x);
                report["objective_index"] = rep.index + 1;
                report["min_ratio"] = std::isfinite(rep.min_ratio) ? Json(rep.min_ratio) : Json("inf");
            }
            emit(opts, std::move(report), started);
            return 0;
        }

        if (rec_cmd->parsed()) {
            const auto schedule = parse_schedule(opts);
            vodiag::RecessionParams rp;
            rp.probe = params;
            const auto rep = vodiag::recession_probe(problem, schedule, opts.seed, rp);
            Json report = vodiag::report_header(command_echo, problem, opts.seed);
            report["thresholds"]["norm_floor"] = rp.norm_floor;
            report["thresholds"]["direction_tol"] = rp.direction_tol;
            report["result"] = vodiag::recession_json(rep);
            emit(opts, std::move(report), started);
            return 0;
        }

        if (exist_cmd->parsed()) {
            const auto schedule = parse_schedule(opts);
            Eigen::VectorXd lo, hi;
            if (!exist_box.empty()) parse_box(exist_box, problem.n(), lo, hi);
            const auto rep = vodiag::geoffrion_existence_report(problem, schedule, params.mode,
                                                                opts.seed, lo, hi);
            Json report = vodiag::report_header(command_echo, problem, opts.seed);
            report["result"] = vodiag::existence_json(rep, ropts);
            emit(opts, std::move(report), started);
            return 0;
        }

        if (grid_cmd->parsed()) {
            Eigen::VectorXd lo, hi;
            parse_box(oracle_box, problem.n(), lo, hi);
            const auto spec = vodiag::GridSpec::from_step(lo, hi, oracle_step);
            const auto pts = vodiag::grid_pareto(problem, spec);
            Json report = vodiag::report_header(command_echo, problem, opts.seed);
            report["thresholds"]["grid_step"] = oracle_step;
            Json rows = Json::array();
            for (const auto& x : pts) {
                Json row;
                row["x"] = vodiag::to_json(x);
                row["f"] = vodiag::to_json(problem.evaluate(x));
                rows.push_back(std::move(row));
            }
            report["nondominated_count"] = static_cast<int>(pts.size());
            report["nondominated"] = std::move(rows);
            emit(opts, std::move(report), started);
            return 0;
        }

        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const vodiag::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const vodiag::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const vodiag::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
