#include "vodiag/asymptotics.hpp"

#include "vodiag/descent.hpp"
#include "vodiag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace vodiag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBig = 1e100;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic indexed parallel map: results are merged by index, so the
/// output does not depend on the thread count.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

RadiusSchedule RadiusSchedule::geometric(double r0, double rho, int count, int samples) {
    if (r0 <= 0 || rho <= 1 || count < 1) throw InputError("geometric schedule needs r0>0, rho>1, count>=1");
    RadiusSchedule s;
    s.samples_per_shell = samples;
    double r = r0;
    for (int k = 0; k < count; ++k) {
        r *= rho;
        s.radii.push_back(r);
    }
    s.validate();
    return s;
}

void RadiusSchedule::validate() const {
    if (radii.empty()) throw InputError("radius schedule must be nonempty");
    if (samples_per_shell < 1) throw InputError("samples_per_shell must be positive");
    double prev = 0.0;
    for (double r : radii) {
        if (!(r > prev)) throw InputError("radii must be strictly increasing and positive");
        prev = r;
    }
}

double RadiusSchedule::shell_upper(int k) const {
    const int n = shells();
    if (k < 0 || k >= n) throw InputError("shell index out of range");
    if (k + 1 < n) return radii[static_cast<std::size_t>(k + 1)];
    const double ratio = n >= 2 ? radii.back() / radii[static_cast<std::size_t>(n - 2)] : 2.0;
    return radii.back() * ratio;
}

namespace {

struct StatFns {
    // Total functions: project to the feasible set first, map failures to kBig.
    std::function<double(const Eigen::VectorXd&)> nu;
    std::function<double(const Eigen::VectorXd&)> gamma;
};

StatFns make_stat_fns(const Problem& problem, const ProbeParams& params) {
    RabierParams rp;
    rp.mode = params.mode;
    rp.tol = params.solver_tol;
    StatFns fns;
    fns.nu = [&problem, rp](const Eigen::VectorXd& x) -> double {
        try {
            return rabier_nu(problem, problem.feasible().project(x), rp);
        } catch (const Error&) {
            return kBig;
        }
    };
    fns.gamma = [&problem, rp](const Eigen::VectorXd& x) -> double {
        try {
            return gamma_residual(problem, problem.feasible().project(x), rp);
        } catch (const Error&) {
            return kBig;
        }
    };
    return fns;
}

DescentRegion shell_region(const Problem& problem, int, double lo, double hi) {
    DescentRegion region;
    region.feasible = &problem.feasible();
    region.shell_lo = lo;
    region.shell_hi = hi;
    return region;
}

} // namespace

std::vector<std::vector<Eigen::VectorXd>> shell_sampler(const Problem& problem,
                                                        const SublevelBound& ybar,
                                                        const RadiusSchedule& schedule,
                                                        std::uint64_t seed,
                                                        const ProbeParams& params) {
    schedule.validate();
    if (ybar.dimension() != problem.m()) throw InputError("sublevel bound dimension mismatch");

    const int n = problem.n();
    std::vector<std::vector<Eigen::VectorXd>> shells(static_cast<std::size_t>(schedule.shells()));

    for (int k = 0; k < schedule.shells(); ++k) {
        const double lo = schedule.radii[static_cast<std::size_t>(k)];
        const double hi = schedule.shell_upper(k);
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);

        auto& out = shells[static_cast<std::size_t>(k)];
        struct Reject {
            Eigen::VectorXd x;
            double violation;
        };
        std::vector<Reject> rejects;

        const int attempts = 8 * schedule.samples_per_shell;
        for (int a = 0; a < attempts && static_cast<int>(out.size()) < schedule.samples_per_shell; ++a) {
            Eigen::VectorXd dir(n);
            for (int i = 0; i < n; ++i) dir[i] = gauss(rng);
            const double dn = dir.norm();
            if (dn < 1e-12) continue;
            dir /= dn;
            const double radius = lo + (hi - lo) * unif(rng);
            Eigen::VectorXd x = radius * dir;
            x = problem.feasible().project(x);
            const double r = x.norm();
            if (r < lo || r >= hi) {
                if (r > 1e-300) {
                    x *= (lo + 0.5 * (hi - lo)) / r;
                } else {
                    continue;
                }
            }
            if (!problem.feasible().contains(x, params.feas_tol)) {
                continue;
            }
            const double viol = problem.sublevel_violation(ybar, x);
            if (viol <= params.feas_tol) {
                out.push_back(std::move(x));
            } else if (static_cast<int>(rejects.size()) < 4 * params.descents_per_shell) {
                rejects.push_back({std::move(x), viol});
            }
        }

        if (out.empty() && !rejects.empty()) {
            std::sort(rejects.begin(), rejects.end(),
                      [](const Reject& a, const Reject& b) { return a.violation < b.violation; });
            const DescentRegion region = shell_region(problem, k, lo, hi);
            DescentOptions opts;
            opts.polish_bracket = 0.05 * (hi - lo);
            const int tries = std::min<int>(params.descents_per_shell, static_cast<int>(rejects.size()));
            for (int t = 0; t < tries; ++t) {
                auto descended = descend(
                    [&](const Eigen::VectorXd& p) {
                        return problem.sublevel_violation(ybar, problem.feasible().project(p));
                    },
                    rejects[static_cast<std::size_t>(t)].x, region, opts);
                Eigen::VectorXd x = problem.feasible().project(descended.x);
                const double r = x.norm();
                if (r < lo || r >= hi) continue;
                if (problem.feasible().contains(x, params.feas_tol) &&
                    problem.sublevel_violation(ybar, x) <= params.feas_tol)
                    out.push_back(std::move(x));
            }
        }
    }
    return shells;
}

namespace {

SampleRecord make_record(const Problem& problem, const Eigen::VectorXd& x, int shell) {
    SampleRecord rec;
    rec.x = x;
    rec.norm_x = x.norm();
    rec.f = problem.evaluate(x);
    rec.shell = shell;
    return rec;
}

enum class CloudKind { PalaisSmale, WeakPalaisSmale, Tame };

double cloud_statistic(CloudKind kind, double nu, double gamma, double norm_x) {
    switch (kind) {
        case CloudKind::PalaisSmale: return nu;
        case CloudKind::WeakPalaisSmale: return norm_x * nu;
        case CloudKind::Tame: return gamma;
    }
    return kBig;
}

double distance_to_bound(const Eigen::VectorXd& f, const SublevelBound& ybar) {
    double s = 0.0;
    bool any = false;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        if (ybar.values()[i] < kInf) {
            const double d = f[i] - ybar.values()[i];
            s += d * d;
            any = true;
        }
    }
    return any ? std::sqrt(s) : kInf;
}

struct Cluster {
    Eigen::VectorXd rep;
    std::vector<SampleRecord> members;
    std::vector<int> shells;
};

/// Greedy clustering of accepted records in objective space, most-asymptotic
/// lowest-residual records first.
std::vector<Cluster> cluster_records(std::vector<SampleRecord> accepted, double radius) {
    std::stable_sort(accepted.begin(), accepted.end(), [](const SampleRecord& a, const SampleRecord& b) {
        if (a.shell != b.shell) return a.shell > b.shell;
        return a.statistic < b.statistic;
    });
    std::vector<Cluster> clusters;
    for (auto& rec : accepted) {
        bool placed = false;
        for (auto& c : clusters) {
            if ((rec.f - c.rep).norm() <= radius) {
                c.shells.push_back(rec.shell);
                c.members.push_back(std::move(rec));
                placed = true;
                break;
            }
        }
        if (!placed) {
            Cluster c;
            c.rep = rec.f;
            c.shells.push_back(rec.shell);
            c.members.push_back(std::move(rec));
            clusters.push_back(std::move(c));
        }
    }
    return clusters;
}

CloudCandidate candidate_from_cluster(Cluster&& c, const SublevelBound& ybar, bool pick_min_residual) {
    CloudCandidate cand;
    std::sort(c.shells.begin(), c.shells.end());
    cand.shell_span = static_cast<int>(std::unique(c.shells.begin(), c.shells.end()) - c.shells.begin());
    cand.max_shell = c.shells.front();
    for (const auto& rec : c.members) cand.max_shell = std::max(cand.max_shell, rec.shell);

    // Candidate value: for asymptotic clouds, the attained image nearest the
    // finite sublevel bound resolves boundary limit values; for the critical
    // cloud the most critical member is the honest representative.
    std::size_t pick = 0;
    double best = kInf;
    for (std::size_t i = 0; i < c.members.size(); ++i) {
        double score;
        if (pick_min_residual) {
            score = c.members[i].statistic;
        } else {
            score = distance_to_bound(c.members[i].f, ybar);
            if (score == kInf) score = -static_cast<double>(c.members[i].shell) - c.members[i].norm_x;
        }
        if (score < best) {
            best = score;
            pick = i;
        }
    }
    cand.y = c.members[pick].f;
    cand.best_residual = kInf;
    for (const auto& rec : c.members) cand.best_residual = std::min(cand.best_residual, rec.statistic);
    cand.witness = std::move(c.members);
    return cand;
}

AsymptoticCloud run_cloud_probe(const Problem& problem, const SublevelBound& ybar,
                                const RadiusSchedule& schedule, std::uint64_t seed,
                                const ProbeParams& params, CloudKind kind) {
    const StatFns fns = make_stat_fns(problem, params);
    const auto shells = shell_sampler(problem, ybar, schedule, seed, params);
    const int K = schedule.shells();

    AsymptoticCloud cloud;
    cloud.accepted_per_shell.assign(static_cast<std::size_t>(K), 0);
    std::vector<SampleRecord> accepted;
    std::vector<double> min_fnorm_accepted(static_cast<std::size_t>(K), kInf);

    const auto statistic_at = [&](const Eigen::VectorXd& x, SampleRecord& rec) {
        if (kind == CloudKind::Tame) {
            rec.gamma = fns.gamma(x);
        } else {
            rec.nu = fns.nu(x);
        }
        rec.statistic = cloud_statistic(kind, rec.nu, rec.gamma, rec.norm_x);
    };

    for (int k = 0; k < K; ++k) {
        const auto& pts = shells[static_cast<std::size_t>(k)];
        if (pts.empty()) continue;
        const double lo = schedule.radii[static_cast<std::size_t>(k)];
        const double hi = schedule.shell_upper(k);
        const double threshold =
            kind == CloudKind::Tame
                ? params.gamma_tol
                : params.tau_abs / std::pow(lo, params.ps_exponent);

        std::vector<SampleRecord> recs(pts.size());
        parallel_for(static_cast<int>(pts.size()), params.threads, [&](int i) {
            recs[static_cast<std::size_t>(i)] = make_record(problem, pts[static_cast<std::size_t>(i)], k);
            statistic_at(pts[static_cast<std::size_t>(i)], recs[static_cast<std::size_t>(i)]);
        });

        // Refine the most promising samples by shell-restricted descent on
        // the acceptance statistic.
        std::vector<int> order(recs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return recs[static_cast<std::size_t>(a)].statistic <
                                                    recs[static_cast<std::size_t>(b)].statistic; });
        const int descents = std::min<int>(params.descents_per_shell, static_cast<int>(order.size()));
        const DescentRegion region = shell_region(problem, k, lo, hi);
        const auto stat_fn = [&](const Eigen::VectorXd& x) -> double {
            const Eigen::VectorXd projected = problem.feasible().project(x);
            const double nu_or_gamma = kind == CloudKind::Tame ? fns.gamma(projected) : fns.nu(projected);
            return cloud_statistic(kind, nu_or_gamma, nu_or_gamma, projected.norm());
        };
        const auto sublevel_ok = [&](const Eigen::VectorXd& x) {
            return problem.feasible().contains(x, params.feas_tol) &&
                   problem.sublevel_violation(ybar, x) <= params.feas_tol;
        };
        std::vector<SampleRecord> refined(static_cast<std::size_t>(descents));
        parallel_for(descents, params.threads, [&](int d) {
            DescentOptions opts;
            opts.polish_bracket = std::min(1.0, 0.05 * (hi - lo));
            const auto res = descend(stat_fn, recs[static_cast<std::size_t>(order[static_cast<std::size_t>(d)])].x,
                                     region, opts, sublevel_ok);
            if (!sublevel_ok(res.x)) return;
            SampleRecord rec = make_record(problem, res.x, k);
            statistic_at(res.x, rec);
            refined[static_cast<std::size_t>(d)] = std::move(rec);
        });
        for (auto& rec : refined)
            if (rec.shell == k) recs.push_back(std::move(rec));

        for (auto& rec : recs) {
            if (rec.statistic <= threshold) {
                // Complete the record for witness tables and replay.
                if (std::isnan(rec.nu)) rec.nu = fns.nu(rec.x);
                if (std::isnan(rec.gamma)) rec.gamma = fns.gamma(rec.x);
                ++cloud.accepted_per_shell[static_cast<std::size_t>(k)];
                min_fnorm_accepted[static_cast<std::size_t>(k)] =
                    std::min(min_fnorm_accepted[static_cast<std::size_t>(k)], rec.f.norm());
                accepted.push_back(std::move(rec));
            }
        }
    }

    if (accepted.empty()) {
        cloud.notes.push_back("no accepted sample up to the largest shell radius at the configured thresholds");
        return cloud;
    }

    auto clusters = cluster_records(std::move(accepted), params.cluster_radius);
    const int need_span = std::min(params.min_persist_shells, K);
    bool accepted_in_top = false;
    for (int k = std::max(0, K - 2); k < K; ++k)
        accepted_in_top = accepted_in_top || cloud.accepted_per_shell[static_cast<std::size_t>(k)] > 0;

    std::vector<CloudCandidate> qualified;
    for (auto& c : clusters) {
        CloudCandidate cand = candidate_from_cluster(std::move(c), ybar, /*pick_min_residual=*/false);
        if (cand.shell_span >= need_span && cand.max_shell >= K - 2) qualified.push_back(std::move(cand));
    }
    // Member-level representatives can drift toward a neighboring cluster;
    // re-deduplicate so the reported candidates stay pairwise separated.
    std::stable_sort(qualified.begin(), qualified.end(),
                     [&](const CloudCandidate& a, const CloudCandidate& b) {
                         const double da = distance_to_bound(a.y, ybar);
                         const double db = distance_to_bound(b.y, ybar);
                         if (da != db) return da < db;
                         if (a.max_shell != b.max_shell) return a.max_shell > b.max_shell;
                         return a.best_residual < b.best_residual;
                     });
    for (auto& cand : qualified) {
        bool close = false;
        for (const auto& kept : cloud.candidates)
            close = close || (cand.y - kept.y).norm() <= params.cluster_radius;
        if (!close) cloud.candidates.push_back(std::move(cand));
    }

    if (cloud.candidates.empty()) {
        if (accepted_in_top) {
            bool norms_grow = true;
            double prev = 0.0;
            for (int k = 0; k < K; ++k) {
                const double v = min_fnorm_accepted[static_cast<std::size_t>(k)];
                if (v == kInf) continue;
                if (v < prev) norms_grow = false;
                prev = std::max(prev, v);
            }
            cloud.notes.push_back(norms_grow
                                      ? "statistic vanishes along diverging samples but image norms diverge; "
                                        "no convergent limit value up to the largest radius"
                                      : "accepted samples reach the top shells but form no persistent cluster");
        } else {
            cloud.notes.push_back("accepted samples do not persist to the top shells");
        }
    }
    return cloud;
}

} // namespace

AsymptoticCloud ps_probe(const Problem& problem, const SublevelBound& ybar,
                         const RadiusSchedule& schedule, std::uint64_t seed,
                         const ProbeParams& params) {
    return run_cloud_probe(problem, ybar, schedule, seed, params, CloudKind::PalaisSmale);
}

AsymptoticCloud weak_ps_probe(const Problem& problem, const SublevelBound& ybar,
                              const RadiusSchedule& schedule, std::uint64_t seed,
                              const ProbeParams& params) {
    return run_cloud_probe(problem, ybar, schedule, seed, params, CloudKind::WeakPalaisSmale);
}

AsymptoticCloud mtame_probe(const Problem& problem, const SublevelBound& ybar,
                            const RadiusSchedule& schedule, std::uint64_t seed,
                            const ProbeParams& params) {
    return run_cloud_probe(problem, ybar, schedule, seed, params, CloudKind::Tame);
}

Verdict bounded_section_probe(const Problem& problem, const SublevelBound& ybar,
                              const RadiusSchedule& schedule, std::uint64_t seed,
                              const ProbeParams& params) {
    if (!ybar.all_finite())
        throw PreconditionError("bounded-section probe requires a finite sublevel bound");
    const auto shells = shell_sampler(problem, ybar, schedule, seed, params);
    const int K = schedule.shells();
    const int m = problem.m();

    Verdict verdict;
    Eigen::VectorXd running_min = Eigen::VectorXd::Constant(m, kInf);
    std::vector<SampleRecord> chain;

    for (int k = 0; k < K; ++k) {
        const auto& pts = shells[static_cast<std::size_t>(k)];
        if (pts.empty()) continue;
        const double lo = schedule.radii[static_cast<std::size_t>(k)];
        const double hi = schedule.shell_upper(k);

        std::vector<SampleRecord> recs;
        recs.reserve(pts.size() + static_cast<std::size_t>(m * params.descents_per_shell));
        for (const auto& x : pts) recs.push_back(make_record(problem, x, k));

        // Sharpen per-coordinate minima within the shell.
        const DescentRegion region = shell_region(problem, k, lo, hi);
        const auto sublevel_ok = [&](const Eigen::VectorXd& x) {
            return problem.feasible().contains(x, params.feas_tol) &&
                   problem.sublevel_violation(ybar, x) <= params.feas_tol;
        };
        for (int i = 0; i < m; ++i) {
            std::vector<int> order(pts.size());
            for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return recs[static_cast<std::size_t>(a)].f[i] < recs[static_cast<std::size_t>(b)].f[i];
            });
            const int tries = std::min<int>(2, static_cast<int>(order.size()));
            for (int t = 0; t < tries; ++t) {
                DescentOptions opts;
                opts.max_steps = 120;
                opts.polish_rounds = 1;
                opts.polish_bracket = 0.05 * (hi - lo);
                const auto res = descend(
                    [&](const Eigen::VectorXd& p) {
                        return problem.objective(i).eval(problem.feasible().project(p));
                    },
                    recs[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])].x, region, {}, sublevel_ok);
                if (sublevel_ok(res.x)) recs.push_back(make_record(problem, res.x, k));
            }
        }

        double shell_min = kInf;
        for (const auto& rec : recs) {
            bool improved = false;
            for (int i = 0; i < m; ++i) {
                shell_min = std::min(shell_min, rec.f[i]);
                if (rec.f[i] < running_min[i]) {
                    running_min[i] = rec.f[i];
                    improved = true;
                }
            }
            if (improved) chain.push_back(rec);
        }
        verdict.shell_summary.emplace_back(lo, shell_min);
    }

    if (running_min.minCoeff() < -params.divergence_threshold) {
        verdict.status = VerdictStatus::FailsWithWitness;
        verdict.witness = std::move(chain);
        verdict.detail = "a coordinate of f decreases past -divergence_threshold along the sampled shells";
        const StatFns fns = make_stat_fns(problem, params);
        for (auto& rec : verdict.witness) {
            rec.nu = fns.nu(rec.x);
            rec.gamma = fns.gamma(rec.x);
        }
    } else {
        verdict.status = VerdictStatus::HoldsEvidence;
        verdict.detail = "all sampled coordinate minima stay bounded below";
    }
    return verdict;
}

Verdict properness_probe(const Problem& problem, const SublevelBound& ybar,
                         const RadiusSchedule& schedule, std::uint64_t seed,
                         const ProbeParams& params) {
    const auto shells = shell_sampler(problem, ybar, schedule, seed, params);
    const int K = schedule.shells();
    const double cap = params.bound_cap_factor * (1.0 + ybar.finite_norm());

    Verdict verdict;
    std::vector<SampleRecord> argmins(static_cast<std::size_t>(K));
    std::vector<double> shell_min(static_cast<std::size_t>(K), kInf);
    int last_nonempty = -1;

    for (int k = 0; k < K; ++k) {
        const auto& pts = shells[static_cast<std::size_t>(k)];
        if (pts.empty()) continue;
        last_nonempty = k;
        const double lo = schedule.radii[static_cast<std::size_t>(k)];
        const double hi = schedule.shell_upper(k);

        std::vector<SampleRecord> recs;
        recs.reserve(pts.size() + static_cast<std::size_t>(params.descents_per_shell));
        for (const auto& x : pts) recs.push_back(make_record(problem, x, k));

        std::vector<int> order(recs.size());
        for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return recs[static_cast<std::size_t>(a)].f.norm() < recs[static_cast<std::size_t>(b)].f.norm();
        });
        const DescentRegion region = shell_region(problem, k, lo, hi);
        const auto sublevel_ok = [&](const Eigen::VectorXd& x) {
            return problem.feasible().contains(x, params.feas_tol) &&
                   problem.sublevel_violation(ybar, x) <= params.feas_tol;
        };
        const int tries = std::min<int>(params.descents_per_shell, static_cast<int>(order.size()));
        std::vector<SampleRecord> refined(static_cast<std::size_t>(tries));
        parallel_for(tries, params.threads, [&](int t) {
            DescentOptions opts;
            opts.polish_bracket = std::min(1.0, 0.05 * (hi - lo));
            const auto res = descend(
                [&](const Eigen::VectorXd& p) {
                    return problem.evaluate(problem.feasible().project(p)).squaredNorm();
                },
                recs[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])].x, region, opts, sublevel_ok);
            if (sublevel_ok(res.x)) refined[static_cast<std::size_t>(t)] = make_record(problem, res.x, k);
        });
        for (auto& rec : refined)
            if (rec.shell == k) recs.push_back(std::move(rec));

        for (auto& rec : recs) {
            const double fn = rec.f.norm();
            if (fn < shell_min[static_cast<std::size_t>(k)]) {
                shell_min[static_cast<std::size_t>(k)] = fn;
                argmins[static_cast<std::size_t>(k)] = rec;
            }
        }
        verdict.shell_summary.emplace_back(lo, shell_min[static_cast<std::size_t>(k)]);
    }

    if (last_nonempty < 0) {
        verdict.status = VerdictStatus::HoldsEvidence;
        verdict.detail = "sublevel set produced no samples in any shell (bounded sublevel evidence)";
        return verdict;
    }
    if (last_nonempty < K - 2) {
        verdict.status = VerdictStatus::HoldsEvidence;
        verdict.detail = "sublevel samples empty out below the largest shells (bounded sublevel evidence)";
        return verdict;
    }
    // Geometric growth of the smallest image norms through the last shells
    // is properness evidence even below the cap (the cap scales with |ybar|
    // and can dwarf every sampled image). The growth must already be within
    // a few doublings of the cap, otherwise it is numerical noise.
    {
        std::vector<double> tail;
        for (int k = 0; k <= last_nonempty; ++k)
            if (shell_min[static_cast<std::size_t>(k)] < kInf)
                tail.push_back(shell_min[static_cast<std::size_t>(k)]);
        if (tail.size() >= 3) {
            const double a = tail[tail.size() - 3], b = tail[tail.size() - 2], c = tail.back();
            if (a > 0 && b >= 2.0 * a && c >= 2.0 * b && c >= cap / 16.0) {
                verdict.status = VerdictStatus::HoldsEvidence;
                verdict.detail = "image norms grow geometrically through the largest sampled shells";
                return verdict;
            }
        }
    }
    if (shell_min[static_cast<std::size_t>(last_nonempty)] <= cap) {
        verdict.status = VerdictStatus::FailsWithWitness;
        for (int k = 0; k < K; ++k)
            if (shell_min[static_cast<std::size_t>(k)] < kInf &&
                shell_min[static_cast<std::size_t>(k)] <= cap)
                verdict.witness.push_back(argmins[static_cast<std::size_t>(k)]);
        verdict.detail = "image norms stay below the cap while ||x|| grows through the largest shells";
        const StatFns fns = make_stat_fns(problem, params);
        for (auto& rec : verdict.witness) {
            rec.nu = fns.nu(rec.x);
            rec.gamma = fns.gamma(rec.x);
        }
    } else {
        verdict.status = VerdictStatus::HoldsEvidence;
        verdict.detail = "image norms exceed the cap in the largest shells";
    }
    return verdict;
}

AsymptoticCloud k_zero_cloud(const Problem& problem, const SublevelBound& ybar,
                             const Eigen::VectorXd& box_lower, const Eigen::VectorXd& box_upper,
                             int seeds_per_dim, const ProbeParams& params) {
    const int n = problem.n();
    if (box_lower.size() != n || box_upper.size() != n)
        throw InputError("search box dimension does not match problem dimension");
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(box_lower[i]) || !std::isfinite(box_upper[i]) || box_lower[i] > box_upper[i])
            throw InputError("search box must be finite with lower <= upper");
    }
    if (seeds_per_dim < 2) throw InputError("need at least two seeds per dimension");
    double total = 1;
    for (int i = 0; i < n; ++i) total *= seeds_per_dim;
    if (total > 1e6) throw InputError("seed grid exceeds the size guard");

    const StatFns fns = make_stat_fns(problem, params);
    DescentRegion region;
    region.feasible = &problem.feasible();
    region.box_lower = box_lower;
    region.box_upper = box_upper;
    const auto sublevel_ok = [&](const Eigen::VectorXd& x) {
        return problem.feasible().contains(x, params.feas_tol) &&
               problem.sublevel_violation(ybar, x) <= params.feas_tol;
    };

    // Seed grid over the box.
    std::vector<Eigen::VectorXd> seeds;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(idx[static_cast<std::size_t>(i)]) / (seeds_per_dim - 1);
            x[i] = box_lower[i] + t * (box_upper[i] - box_lower[i]);
        }
        seeds.push_back(std::move(x));
        int d = 0;
        while (d < n && ++idx[static_cast<std::size_t>(d)] == seeds_per_dim) {
            idx[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == n) break;
    }

    std::vector<SampleRecord> accepted_store(seeds.size());
    std::vector<char> has(seeds.size(), 0);
    parallel_for(static_cast<int>(seeds.size()), params.threads, [&](int s) {
        Eigen::VectorXd x = region.project(seeds[static_cast<std::size_t>(s)]);
        // Repair into the sublevel set first, then chase criticality.
        if (!sublevel_ok(x)) {
            DescentOptions ropts;
            ropts.max_steps = 300;
            const auto repaired = descend(
                [&](const Eigen::VectorXd& p) {
                    const Eigen::VectorXd q = region.project(p);
                    return std::max(problem.sublevel_violation(ybar, q), problem.feasible().violation(q));
                },
                x, region, ropts);
            x = region.project(repaired.x);
            if (!sublevel_ok(x)) return;
        }
        DescentOptions opts;
        opts.polish_rounds = 3;
        const auto res = descend([&](const Eigen::VectorXd& p) { return fns.nu(region.project(p)); }, x,
                                 region, opts, sublevel_ok);
        if (!sublevel_ok(res.x)) return;
        SampleRecord rec = make_record(problem, res.x, 0);
        rec.nu = fns.nu(res.x);
        rec.statistic = rec.nu;
        if (rec.statistic <= params.crit_tol) {
            rec.gamma = fns.gamma(res.x);
            accepted_store[static_cast<std::size_t>(s)] = std::move(rec);
            has[static_cast<std::size_t>(s)] = 1;
        }
    });

    std::vector<SampleRecord> accepted;
    for (std::size_t s = 0; s < seeds.size(); ++s)
        if (has[s]) accepted.push_back(std::move(accepted_store[s]));

    AsymptoticCloud cloud;
    cloud.accepted_per_shell.assign(1, static_cast<int>(accepted.size()));
    if (accepted.empty()) {
        cloud.notes.push_back("no critical sublevel point found from the seed grid");
        return cloud;
    }
    auto clusters = cluster_records(std::move(accepted), params.cluster_radius);
    std::vector<CloudCandidate> all;
    for (auto& c : clusters)
        all.push_back(candidate_from_cluster(std::move(c), ybar, /*pick_min_residual=*/true));
    std::stable_sort(all.begin(), all.end(), [](const CloudCandidate& a, const CloudCandidate& b) {
        return a.best_residual < b.best_residual;
    });
    for (auto& cand : all) {
        bool close = false;
        for (const auto& kept : cloud.candidates)
            close = close || (cand.y - kept.y).norm() <= params.cluster_radius;
        if (!close) cloud.candidates.push_back(std::move(cand));
    }
    return cloud;
}

CrosscheckReport equivalence_crosscheck(const Problem& problem, const SublevelBound& ybar,
                                      const RadiusSchedule& schedule, std::uint64_t seed,
                                      const ProbeParams& params) {
    CrosscheckReport rep;
    rep.section = bounded_section_probe(problem, ybar, schedule, seed, params);
    if (!rep.section.holds())
        throw PreconditionError(
            "bounded-section probe failed: the equivalence hypothesis does not hold at this sublevel");
    rep.proper = properness_probe(problem, ybar, schedule, seed, params);
    rep.ps = ps_probe(problem, ybar, schedule, seed, params);
    rep.weak_ps = weak_ps_probe(problem, ybar, schedule, seed, params);
    rep.mtame = mtame_probe(problem, ybar, schedule, seed, params);
    rep.proper_holds = rep.proper.holds();
    rep.ps_empty = rep.ps.empty();
    rep.weak_ps_empty = rep.weak_ps.empty();
    rep.mtame_empty = rep.mtame.empty();
    rep.agree = rep.proper_holds == rep.ps_empty && rep.ps_empty == rep.weak_ps_empty &&
                rep.weak_ps_empty == rep.mtame_empty;
    return rep;
}

} // namespace vodiag
