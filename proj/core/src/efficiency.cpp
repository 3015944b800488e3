#include "vodiag/efficiency.hpp"

#include "vodiag/descent.hpp"
#include "vodiag/errors.hpp"
#include "vodiag/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace vodiag {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool dominates(const Eigen::VectorXd& y1, const Eigen::VectorXd& y2) {
    if (y1.size() != y2.size()) throw InputError("dominance compares equal dimensions");
    bool strict = false;
    for (Eigen::Index i = 0; i < y1.size(); ++i) {
        if (y1[i] > y2[i]) return false;
        if (y1[i] < y2[i]) strict = true;
    }
    return strict;
}

Verdict pareto_verify(const Problem& problem, const Eigen::VectorXd& xbar,
                      const std::vector<Eigen::VectorXd>& oracle_samples, double tol) {
    if (!problem.feasible().contains(xbar, std::max(tol, 1e-9)))
        throw PreconditionError("pareto check queried at an infeasible point");
    const Eigen::VectorXd fbar = problem.evaluate(xbar);

    Verdict verdict;
    for (const auto& x : oracle_samples) {
        const Eigen::VectorXd f = problem.evaluate(x);
        bool leq = true;
        bool margin = false;
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            if (f[i] > fbar[i]) {
                leq = false;
                break;
            }
            if (f[i] < fbar[i] - tol) margin = true;
        }
        if (leq && margin) {
            verdict.status = VerdictStatus::FailsWithWitness;
            SampleRecord rec;
            rec.x = x;
            rec.norm_x = x.norm();
            rec.f = f;
            verdict.witness.push_back(std::move(rec));
            verdict.detail = "a sample dominates the tested point";
            return verdict;
        }
    }
    verdict.status = VerdictStatus::HoldsEvidence;
    verdict.detail = "undominated over " + std::to_string(oracle_samples.size()) + " samples";
    return verdict;
}

GeoffrionReport geoffrion_check(const Problem& problem, const Eigen::VectorXd& xbar, double M,
                                const std::vector<Eigen::VectorXd>& oracle_samples, double tol) {
    if (M <= 0) throw InputError("trade-off level M must be positive");
    const Verdict pareto = pareto_verify(problem, xbar, oracle_samples, tol);
    if (!pareto.holds())
        throw PreconditionError("tested point is dominated by a sample; not Pareto efficient");

    const Eigen::VectorXd fbar = problem.evaluate(xbar);
    GeoffrionReport report;
    report.M = M;

    for (const auto& x : oracle_samples) {
        const Eigen::VectorXd f = problem.evaluate(x);
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            if (!(f[i] < fbar[i] - tol)) continue;
            double min_ratio = kInf;
            for (Eigen::Index j = 0; j < f.size(); ++j) {
                if (f[j] > fbar[j]) min_ratio = std::min(min_ratio, (fbar[i] - f[i]) / (f[j] - fbar[j]));
            }
            if (min_ratio > M) {
                report.consistent = false;
                report.x = x;
                report.index = static_cast<int>(i);
                report.min_ratio = min_ratio;
                return report;
            }
        }
    }
    report.consistent = true;
    return report;
}

namespace {

std::vector<Eigen::VectorXd> scalarize_starts(const ScalarizationConfig& config, int n) {
    std::vector<Eigen::VectorXd> starts;
    starts.reserve(static_cast<std::size_t>(config.starts));
    starts.push_back(0.5 * (config.box_lower + config.box_upper));
    std::mt19937_64 rng(config.seed * 0x9e3779b97f4a7c15ULL + 17);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    while (static_cast<int>(starts.size()) < config.starts) {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i)
            x[i] = config.box_lower[i] + unif(rng) * (config.box_upper[i] - config.box_lower[i]);
        starts.push_back(std::move(x));
    }
    return starts;
}

} // namespace

ScalarizeResult scalarize_solve(const Problem& problem, const ScalarizationConfig& config) {
    const int n = problem.n();
    if (config.lambda.size() != problem.m()) throw InputError("weight dimension does not match m");
    if (config.lambda.minCoeff() <= 0) throw InputError("weights must be strictly positive");
    if (config.box_lower.size() != n || config.box_upper.size() != n)
        throw InputError("search box dimension does not match n");
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(config.box_lower[i]) || !std::isfinite(config.box_upper[i]))
            throw InputError("search box must be finite");
    if (config.ybar.dimension() != problem.m()) throw InputError("sublevel bound dimension mismatch");

    DescentRegion region;
    region.box_lower = config.box_lower;
    region.box_upper = config.box_upper;
    const bool projectable = problem.feasible().is_full_space() || problem.feasible().as_box() ||
                             problem.feasible().as_polyhedron();
    if (projectable) region.feasible = &problem.feasible();

    const auto weighted = [&](const Eigen::VectorXd& x) { return config.lambda.dot(problem.evaluate(x)); };
    const auto infeas = [&](const Eigen::VectorXd& x) {
        double v = std::max(0.0, problem.sublevel_violation(config.ybar, x));
        if (!projectable) v = std::max(v, std::max(0.0, problem.feasible().violation(x)));
        return v;
    };

    struct Candidate {
        Eigen::VectorXd x;
        double objective;
    };
    std::vector<std::optional<Candidate>> found(
        static_cast<std::size_t>(config.starts));
    std::vector<double> best_violation(static_cast<std::size_t>(config.starts), kInf);
    const auto starts = scalarize_starts(config, n);

    const auto run_start = [&](int s) {
        Eigen::VectorXd x = region.project(starts[static_cast<std::size_t>(s)]);
        // Quadratic penalty rounds with doubling weight.
        double rho = 10.0;
        for (int round = 0; round < 8; ++round) {
            DescentOptions opts;
            opts.max_steps = config.max_steps / 8 + 10;
            opts.polish_rounds = round == 7 ? 2 : 0;
            opts.polish_bracket = 0.05 * (config.box_upper - config.box_lower).maxCoeff();
            const auto res = descend(
                [&](const Eigen::VectorXd& p) {
                    double pen = 0.0;
                    const double sub = problem.sublevel_violation(config.ybar, p);
                    if (sub > 0) pen += sub * sub;
                    if (!projectable) {
                        const double g = problem.feasible().violation(p);
                        if (g > 0) pen += g * g;
                    }
                    return weighted(p) + rho * pen;
                },
                x, region, opts);
            x = res.x;
            rho *= 2.0;
        }
        // Feasibility repair: pull the iterate into the sublevel set.
        if (infeas(x) > config.tol) {
            DescentOptions ropts;
            ropts.max_steps = 200;
            ropts.polish_rounds = 2;
            const auto rep = descend(infeas, x, region, ropts);
            x = rep.x;
        }
        best_violation[static_cast<std::size_t>(s)] = infeas(x);
        if (best_violation[static_cast<std::size_t>(s)] <= config.tol &&
            problem.feasible().contains(x, config.tol))
            found[static_cast<std::size_t>(s)] = Candidate{x, weighted(x)};
    };
    for (int s = 0; s < config.starts; ++s) run_start(s);

    const Candidate* best = nullptr;
    for (const auto& c : found)
        if (c && (!best || c->objective < best->objective)) best = &*c;
    if (!best) {
        double closest = kInf;
        for (double v : best_violation) closest = std::min(closest, v);
        throw PreconditionError(
            "no start reached the sublevel set within the search box (closest violation " +
            std::to_string(closest) + "); the restricted sublevel set may be empty");
    }

    ScalarizeResult result;
    result.x = best->x;
    result.f = problem.evaluate(best->x);
    result.objective = best->objective;

    GridSpec spec = GridSpec::from_step(config.box_lower, config.box_upper, config.grid_step);
    const auto grid = feasible_grid_points(problem, spec, config.tol);
    result.pareto = pareto_verify(problem, result.x, grid, config.tol);
    return result;
}

ParetoFront pareto_front(const Problem& problem, const std::vector<Eigen::VectorXd>& lambda_grid,
                         const ScalarizationConfig& config, double cluster_radius) {
    ParetoFront front;
    for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
        ScalarizationConfig c = config;
        c.lambda = lambda_grid[li];
        try {
            ScalarizeResult res = scalarize_solve(problem, c);
            if (!res.pareto.holds()) {
                front.failures.push_back("weight " + std::to_string(li) +
                                         ": scalarization point failed the Pareto verification");
                continue;
            }
            bool duplicate = false;
            for (const auto& e : front.entries)
                if ((e.f - res.f).norm() <= cluster_radius) {
                    duplicate = true;
                    break;
                }
            if (!duplicate)
                front.entries.push_back(FrontEntry{lambda_grid[li], std::move(res.x), std::move(res.f)});
        } catch (const Error& err) {
            front.failures.push_back("weight " + std::to_string(li) + ": " + err.what());
        }
    }
    return front;
}

RecessionReport recession_probe(const Problem& problem, const RadiusSchedule& schedule,
                                std::uint64_t seed, const RecessionParams& params) {
    const SublevelBound unrestricted = SublevelBound::unrestricted(problem.m());
    const auto shells = shell_sampler(problem, unrestricted, schedule, seed, params.probe);
    const int K = schedule.shells();

    struct DirCluster {
        Eigen::VectorXd rep;
        Eigen::VectorXd best;     // member with the largest image norm
        double best_norm = 0.0;
        std::vector<int> shells;
    };
    std::vector<DirCluster> clusters;

    for (int k = 0; k < K; ++k) {
        for (const auto& x : shells[static_cast<std::size_t>(k)]) {
            const Eigen::VectorXd f = problem.evaluate(x);
            const double fn = f.norm();
            if (fn < params.norm_floor) continue;
            const Eigen::VectorXd d = f / fn;
            bool placed = false;
            for (auto& c : clusters) {
                if ((d - c.rep).norm() <= params.cluster_radius) {
                    c.shells.push_back(k);
                    if (fn > c.best_norm) {
                        c.best_norm = fn;
                        c.best = d;
                    }
                    placed = true;
                    break;
                }
            }
            if (!placed) clusters.push_back(DirCluster{d, d, fn, {k}});
        }
    }

    RecessionReport report;
    const int need_span = std::min(params.min_persist_shells, K);
    for (auto& c : clusters) {
        std::sort(c.shells.begin(), c.shells.end());
        const int span =
            static_cast<int>(std::unique(c.shells.begin(), c.shells.end()) - c.shells.begin());
        const int top = c.shells.back();
        if (span < need_span || top < K - 2) continue;
        report.directions.push_back(c.best);
        if ((c.best.array() <= params.direction_tol).all()) {
            report.eq8_holds = false;
            if (!report.witness) {
                // The witness lives in the nonpositive orthant: clamp the
                // within-tolerance positive entries and renormalize.
                Eigen::VectorXd w = c.best.cwiseMin(0.0);
                if (w.norm() > 0) w /= w.norm();
                report.witness = std::move(w);
            }
        }
    }
    return report;
}

ExistenceReport geoffrion_existence_report(const Problem& problem, const RadiusSchedule& schedule,
                                           RabierMode mode, std::uint64_t seed,
                                           const Eigen::VectorXd& box_lower,
                                           const Eigen::VectorXd& box_upper) {
    ExistenceReport report;
    RecessionParams rp;
    rp.probe.mode = mode;
    report.recession = recession_probe(problem, schedule, seed, rp);
    report.necessary_refuted = !report.recession.eq8_holds;

    const int n = problem.n();
    Eigen::VectorXd lo = box_lower.size() == n ? box_lower : Eigen::VectorXd::Constant(n, -16.0);
    Eigen::VectorXd hi = box_upper.size() == n ? box_upper : Eigen::VectorXd::Constant(n, 16.0);

    ProbeParams pp;
    pp.mode = mode;

    // Reference sublevel bounds from image quantiles over the sampled shells.
    std::vector<Eigen::VectorXd> images;
    {
        const auto shells =
            shell_sampler(problem, SublevelBound::unrestricted(problem.m()), schedule, seed, pp);
        for (const auto& shell : shells)
            for (const auto& x : shell) images.push_back(problem.evaluate(x));
    }
    std::vector<Eigen::VectorXd> ybar_grid;
    if (!images.empty()) {
        for (double q : {0.25, 0.5, 0.75}) {
            Eigen::VectorXd ybar(problem.m());
            for (int i = 0; i < problem.m(); ++i) {
                std::vector<double> vals;
                vals.reserve(images.size());
                for (const auto& f : images) vals.push_back(f[i]);
                std::sort(vals.begin(), vals.end());
                ybar[i] = vals[static_cast<std::size_t>(q * (vals.size() - 1))];
            }
            bool fresh = true;
            for (const auto& y : ybar_grid)
                if ((y - ybar).norm() <= 1e-12) fresh = false;
            if (fresh) ybar_grid.push_back(std::move(ybar));
        }
    }

    bool all_proper = true;
    bool all_bounded = true;
    for (const auto& ybar_vec : ybar_grid) {
        const SublevelBound ybar(ybar_vec);
        ExistenceReport::SectionProbe sp;
        sp.ybar = ybar_vec;
        sp.section_bounded = bounded_section_probe(problem, ybar, schedule, seed, pp).holds();
        sp.proper = properness_probe(problem, ybar, schedule, seed, pp).holds();
        all_proper = all_proper && sp.proper;
        all_bounded = all_bounded && sp.section_bounded;
        report.sections.push_back(std::move(sp));
    }

    // Critical-cloud inclusion diagnostics at the central reference bound.
    if (!ybar_grid.empty()) {
        const SublevelBound ybar(ybar_grid[ybar_grid.size() / 2]);
        const auto kzero = k_zero_cloud(problem, ybar, lo, hi, n <= 2 ? 33 : 9, pp);
        const auto match = [&](const AsymptoticCloud& cloud, const char* name) {
            ExistenceReport::InclusionCheck check;
            check.cloud = name;
            check.candidates = static_cast<int>(cloud.candidates.size());
            for (const auto& cand : cloud.candidates)
                for (const auto& crit : kzero.candidates)
                    if ((cand.y - crit.y).norm() <= pp.cluster_radius) {
                        ++check.matched;
                        break;
                    }
            report.inclusions.push_back(std::move(check));
        };
        match(ps_probe(problem, ybar, schedule, seed, pp), "palais-smale");
        match(weak_ps_probe(problem, ybar, schedule, seed, pp), "weak-palais-smale");
        match(mtame_probe(problem, ybar, schedule, seed, pp), "tangency");
    }

    report.sufficient_evidence = report.recession.eq8_holds && all_proper && all_bounded &&
                                 !ybar_grid.empty();

    if (report.necessary_refuted) {
        report.summary = "refuted: a recession direction of the image set meets the nonpositive "
                         "orthant, so no bounded-trade-off efficient point exists";
        return report;
    }

    if (report.sufficient_evidence) {
        // Exhibit a candidate point by uniform-weight scalarization and probe
        // its trade-off level.
        try {
            Eigen::VectorXd lambda = Eigen::VectorXd::Ones(problem.m());
            ScalarizationConfig sc(lambda, SublevelBound(ybar_grid[ybar_grid.size() / 2]), lo, hi);
            sc.seed = seed;
            ScalarizeResult res = scalarize_solve(problem, sc);
            if (res.pareto.holds()) {
                GridSpec spec = GridSpec::from_step(lo, hi, sc.grid_step);
                const auto grid = feasible_grid_points(problem, spec, sc.tol);
                for (double level = 1.01; level <= 1100.0; level *= 4.0) {
                    const GeoffrionReport g = geoffrion_check(problem, res.x, level, grid, sc.tol);
                    if (g.consistent) {
                        report.exhibited_consistent = true;
                        report.exhibited_M = level;
                        break;
                    }
                }
                report.exhibited = std::move(res);
            }
        } catch (const Error&) {
            // Exhibition is best-effort; the evidence verdict stands on the probes.
        }
        report.summary = "sufficient-condition evidence holds: the recession cone avoids the "
                         "nonpositive orthant and properness evidence holds at the probed sublevels";
    } else {
        report.summary = "inconclusive: no recession witness, but properness or bounded-section "
                         "evidence failed at some probed sublevel";
    }
    return report;
}

} // namespace vodiag
