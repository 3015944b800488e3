#include "vodiag/oracle.hpp"

#include "vodiag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace vodiag {

GridSpec GridSpec::from_step(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             double step) {
    if (step <= 0) throw InputError("grid step must be positive");
    GridSpec spec;
    spec.lower = lower;
    spec.upper = upper;
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        const double span = upper[i] - lower[i];
        spec.steps.push_back(std::max(2, static_cast<int>(std::floor(span / step + 0.5)) + 1));
    }
    spec.validate();
    return spec;
}

void GridSpec::validate() const {
    if (lower.size() == 0 || lower.size() != upper.size() ||
        static_cast<std::size_t>(lower.size()) != steps.size())
        throw InputError("grid spec fields have mismatched dimensions");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i])
            throw InputError("grid box must be finite with lower <= upper");
        if (steps[static_cast<std::size_t>(i)] < 2) throw InputError("grid needs at least 2 steps per dimension");
    }
    if (total() > 10'000'000) throw InputError("grid size guard exceeded (max 1e7 points)");
}

std::size_t GridSpec::total() const {
    std::size_t t = 1;
    for (int s : steps) {
        if (t > 10'000'001 / static_cast<std::size_t>(s)) return 10'000'001;
        t *= static_cast<std::size_t>(s);
    }
    return t;
}

std::vector<Eigen::VectorXd> grid_points(const GridSpec& spec) {
    spec.validate();
    const int n = static_cast<int>(spec.lower.size());
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(spec.total());
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) {
            const int count = spec.steps[static_cast<std::size_t>(i)];
            const double t = static_cast<double>(idx[static_cast<std::size_t>(i)]) / (count - 1);
            x[i] = spec.lower[i] + t * (spec.upper[i] - spec.lower[i]);
        }
        pts.push_back(std::move(x));
        int d = 0;
        while (d < n && ++idx[static_cast<std::size_t>(d)] == spec.steps[static_cast<std::size_t>(d)]) {
            idx[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == n) break;
    }
    return pts;
}

std::vector<Eigen::VectorXd> feasible_grid_points(const Problem& problem, const GridSpec& spec,
                                                  double tol) {
    std::vector<Eigen::VectorXd> out;
    for (auto& x : grid_points(spec))
        if (problem.feasible().contains(x, tol)) out.push_back(std::move(x));
    return out;
}

namespace {

// Local dominance loop; the oracle deliberately shares no code with the
// efficiency module it cross-checks.
bool image_dominates(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    bool strict = false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

} // namespace

std::vector<Eigen::VectorXd> grid_pareto(const Problem& problem, const GridSpec& spec,
                                         double feas_tol) {
    const auto pts = feasible_grid_points(problem, spec, feas_tol);
    std::vector<Eigen::VectorXd> images;
    images.reserve(pts.size());
    for (const auto& x : pts) images.push_back(problem.evaluate(x));

    // Nondominated archive with in-place pruning.
    std::vector<std::size_t> archive;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t a : archive) {
            if (image_dominates(images[a], images[i])) {
                dominated = true;
                break;
            }
        }
        if (dominated) continue;
        std::vector<std::size_t> kept;
        kept.reserve(archive.size() + 1);
        for (std::size_t a : archive)
            if (!image_dominates(images[i], images[a])) kept.push_back(a);
        kept.push_back(i);
        archive = std::move(kept);
    }
    std::sort(archive.begin(), archive.end());
    std::vector<Eigen::VectorXd> out;
    out.reserve(archive.size());
    for (std::size_t a : archive) out.push_back(pts[a]);
    return out;
}

namespace {

// Recursive enumeration of the discretized weight simplex.
void enumerate_simplex(int coords, int budget, std::vector<int>& cur,
                       const std::function<void(const std::vector<int>&)>& emit) {
    if (coords == 1) {
        cur.push_back(budget);
        emit(cur);
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= budget; ++k) {
        cur.push_back(k);
        enumerate_simplex(coords - 1, budget - k, cur, emit);
        cur.pop_back();
    }
}

double simplex_count(int coords, int budget) {
    // C(budget + coords - 1, coords - 1)
    double c = 1.0;
    for (int i = 1; i <= coords - 1; ++i) c = c * (budget + i) / i;
    return c;
}

} // namespace

namespace {

// Exhaustive minimum of ||p + sum t_j r_j|| over a uniform coefficient grid
// t in [lo, hi]^r with `levels` points per axis; returns the best value and
// the attaining grid point.
double ray_grid_min(const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& rays,
                    const std::vector<double>& lo, const std::vector<double>& hi, int levels,
                    std::vector<double>* arg) {
    const int nr = static_cast<int>(rays.size());
    double best = p.norm();
    if (arg) arg->assign(static_cast<std::size_t>(nr), 0.0);
    if (nr == 0) return best;
    std::vector<int> idx(static_cast<std::size_t>(nr), 0);
    while (true) {
        Eigen::VectorXd z = p;
        for (int j = 0; j < nr; ++j) {
            const double t = lo[static_cast<std::size_t>(j)] +
                             (hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)]) *
                                 idx[static_cast<std::size_t>(j)] / (levels - 1);
            if (t > 0) z += t * rays[static_cast<std::size_t>(j)];
        }
        const double v = z.norm();
        if (v < best) {
            best = v;
            if (arg)
                for (int j = 0; j < nr; ++j)
                    (*arg)[static_cast<std::size_t>(j)] =
                        lo[static_cast<std::size_t>(j)] +
                        (hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)]) *
                            idx[static_cast<std::size_t>(j)] / (levels - 1);
        }
        int d = 0;
        while (d < nr && ++idx[static_cast<std::size_t>(d)] == levels) {
            idx[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == nr) break;
    }
    return best;
}

// Two-stage ray enumeration: full coarse grid over [0, cap], then a fine
// grid in the window around the coarse argmin.
double ray_min_two_stage(const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& rays,
                         double cap, int levels) {
    const int nr = static_cast<int>(rays.size());
    if (nr == 0 || cap <= 0) return p.norm();
    std::vector<double> lo(static_cast<std::size_t>(nr), 0.0);
    std::vector<double> hi(static_cast<std::size_t>(nr), cap);
    std::vector<double> arg;
    double best = ray_grid_min(p, rays, lo, hi, levels, &arg);
    const double spacing = cap / (levels - 1);
    for (int j = 0; j < nr; ++j) {
        lo[static_cast<std::size_t>(j)] = std::max(0.0, arg[static_cast<std::size_t>(j)] - spacing);
        hi[static_cast<std::size_t>(j)] = arg[static_cast<std::size_t>(j)] + spacing;
    }
    best = std::min(best, ray_grid_min(p, rays, lo, hi, levels, nullptr));
    return best;
}

} // namespace

double brute_min_norm(const Polytope& polytope, const Cone& cone, double lambda_step,
                      double ray_cap) {
    if (lambda_step <= 0 || lambda_step > 0.1)
        throw InputError("lambda_step must lie in (0, 0.1]");
    if (polytope.size() > 8) throw InputError("brute force limited to 8 vertices");
    if (cone.rays().size() > 4) throw InputError("brute force limited to 4 rays");
    if (ray_cap < 0) throw InputError("ray cap must be nonnegative");

    const int divisions = static_cast<int>(std::lround(1.0 / lambda_step));
    const int nv = static_cast<int>(polytope.size());
    const int nr = static_cast<int>(cone.rays().size());
    const int ray_levels = nr == 0 ? 1 : std::max(9, divisions / 2 + 1);
    double work = simplex_count(nv, divisions);
    for (int j = 0; j < nr; ++j) work *= 2.0 * ray_levels;
    if (work > 5e7) throw InputError("brute force enumeration guard exceeded");

    const auto& verts = polytope.vertices();
    const auto& rays = cone.rays();
    const Eigen::Index dim = verts.front().size();

    // Coarse pass over the weight simplex, keeping every composition whose
    // value could still hide the optimum under the grid resolution.
    double max_vertex = 0.0;
    for (const auto& v : verts) max_vertex = std::max(max_vertex, v.norm());
    double max_ray = 0.0;
    for (const auto& r : rays) max_ray = std::max(max_ray, r.norm());
    const double slack = lambda_step * static_cast<double>(nv) * max_vertex +
                         (nr > 0 ? 2.0 * ray_cap / (ray_levels - 1) * max_ray * nr : 0.0);

    double best = std::numeric_limits<double>::infinity();
    struct Near {
        std::vector<int> comp;
        double value;
    };
    std::vector<Near> near_best;
    std::vector<int> cur;
    const std::function<void(const std::vector<int>&)> emit = [&](const std::vector<int>& comp) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
        for (int j = 0; j < nv; ++j)
            p += (static_cast<double>(comp[static_cast<std::size_t>(j)]) / divisions) *
                 verts[static_cast<std::size_t>(j)];
        const double value = ray_min_two_stage(p, rays, ray_cap, ray_levels);
        best = std::min(best, value);
        if (value <= best + slack) {
            if (near_best.size() >= 8) {
                std::size_t worst = 0;
                for (std::size_t i = 1; i < near_best.size(); ++i)
                    if (near_best[i].value > near_best[worst].value) worst = i;
                if (near_best[worst].value <= value) return;
                near_best.erase(near_best.begin() + static_cast<std::ptrdiff_t>(worst));
            }
            near_best.push_back({comp, value});
        }
    };
    enumerate_simplex(nv, divisions, cur, emit);

    // Fine pass: re-grid the simplex at a quarter of the step inside the
    // one-step neighborhood of each near-optimal composition. Skipped when
    // the neighborhood enumeration would dwarf the coarse pass.
    const int sub = 4;
    double fine_work = std::pow(2.0 * sub + 1.0, nv);
    for (int j = 0; j < nr; ++j) fine_work *= 2.0 * ray_levels;
    if (fine_work <= 2e6) {
        for (const auto& candidate : near_best) {
            if (candidate.value > best + slack) continue;
            std::vector<int> offset(static_cast<std::size_t>(nv), -sub);
            while (true) {
                int total = 0;
                for (int j = 0; j < nv; ++j) total += offset[static_cast<std::size_t>(j)];
                if (total == 0) {
                    bool valid = true;
                    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
                    for (int j = 0; j < nv && valid; ++j) {
                        const int units = sub * candidate.comp[static_cast<std::size_t>(j)] +
                                          offset[static_cast<std::size_t>(j)];
                        if (units < 0 || units > sub * divisions)
                            valid = false;
                        else
                            p += (static_cast<double>(units) / (sub * divisions)) *
                                 verts[static_cast<std::size_t>(j)];
                    }
                    if (valid) best = std::min(best, ray_min_two_stage(p, rays, ray_cap, ray_levels));
                }
                int d = 0;
                while (d < nv && ++offset[static_cast<std::size_t>(d)] > sub) {
                    offset[static_cast<std::size_t>(d)] = -sub;
                    ++d;
                }
                if (d == nv) break;
            }
        }
    }
    return best;
}

} // namespace vodiag
