#include "vodiag/min_norm.hpp"

#include "vodiag/errors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace vodiag {

namespace {

constexpr double kWeightFloor = 1e-13;


// Affine minimum-norm point over the atoms indexed by corral: minimize
// ||V alpha|| subject to sum alpha = 1, alpha unconstrained in sign.
// Solved through the bordered KKT system.
Eigen::VectorXd affine_min_norm(const Eigen::MatrixXd& v, const std::vector<int>& corral) {
    const int k = static_cast<int>(corral.size());
    Eigen::MatrixXd kkt(k + 1, k + 1);
    kkt.setZero();
    for (int a = 0; a < k; ++a) {
        kkt(0, a + 1) = 1.0;
        kkt(a + 1, 0) = 1.0;
        for (int b = 0; b < k; ++b)
            kkt(a + 1, b + 1) = v.col(corral[static_cast<std::size_t>(a)])
                                    .dot(v.col(corral[static_cast<std::size_t>(b)]));
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs[0] = 1.0;
    Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    return sol.tail(k);
}

struct WolfeState {
    Eigen::VectorXd weights;  // dense over all atoms
    Eigen::VectorXd point;
    int iterations = 0;
};

// Wolfe's minimum-norm-point algorithm over a finite atom set, major cycles
// selecting the most violating atom and minor cycles restoring a corral.
WolfeState wolfe_min_norm(const Eigen::MatrixXd& v, double gap_tol, int max_iter) {
    const int count = static_cast<int>(v.cols());
    WolfeState st;
    st.weights = Eigen::VectorXd::Zero(count);

    int start = 0;
    double best = v.col(0).squaredNorm();
    for (int j = 1; j < count; ++j) {
        const double nj = v.col(j).squaredNorm();
        if (nj < best) {
            best = nj;
            start = j;
        }
    }
    std::vector<int> corral{start};
    Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd x = v.col(start);

    while (st.iterations < max_iter) {
        ++st.iterations;
        int candidate = 0;
        double inner = std::numeric_limits<double>::infinity();
        for (int j = 0; j < count; ++j) {
            const double ip = x.dot(v.col(j));
            if (ip < inner) {
                inner = ip;
                candidate = j;
            }
        }
        if (inner >= x.squaredNorm() - gap_tol) break;
        if (std::find(corral.begin(), corral.end(), candidate) != corral.end()) break;

        corral.push_back(candidate);
        Eigen::VectorXd wk(corral.size());
        wk.head(corral.size() - 1) = w;
        wk[static_cast<Eigen::Index>(corral.size() - 1)] = 0.0;
        w = wk;

        while (st.iterations < max_iter) {
            ++st.iterations;
            Eigen::VectorXd alpha = affine_min_norm(v, corral);
            if (alpha.minCoeff() > kWeightFloor) {
                w = alpha;
                break;
            }
            double theta = 1.0;
            for (Eigen::Index i = 0; i < alpha.size(); ++i) {
                if (alpha[i] <= kWeightFloor && w[i] > alpha[i])
                    theta = std::min(theta, w[i] / (w[i] - alpha[i]));
            }
            w = (1.0 - theta) * w + theta * alpha;
            std::vector<int> next_corral;
            std::vector<double> next_w;
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                if (w[i] > kWeightFloor) {
                    next_corral.push_back(corral[static_cast<std::size_t>(i)]);
                    next_w.push_back(w[i]);
                }
            }
            if (next_corral.empty()) {
                // Numerical collapse; keep the heaviest atom.
                Eigen::Index imax;
                w.maxCoeff(&imax);
                next_corral.push_back(corral[static_cast<std::size_t>(imax)]);
                next_w.push_back(1.0);
            }
            corral = std::move(next_corral);
            w = Eigen::Map<Eigen::VectorXd>(next_w.data(), static_cast<Eigen::Index>(next_w.size()));
        }
        const double wsum = w.sum();
        if (wsum > 0) w /= wsum;
        x.setZero();
        for (std::size_t i = 0; i < corral.size(); ++i) x += w[static_cast<Eigen::Index>(i)] * v.col(corral[i]);
    }

    for (std::size_t i = 0; i < corral.size(); ++i)
        st.weights[corral[i]] = w[static_cast<Eigen::Index>(i)];
    st.point = x;
    return st;
}

struct CoreResult {
    Eigen::VectorXd point;
    Eigen::VectorXd hull;
    Eigen::VectorXd cone;
    bool certified = false;
};

// Core solver over raw atoms (duplicates permitted). The unbounded cone is
// handled by bounding each ray coefficient by T and expanding
// conv(V) + sum_j [0,T] r_j into the Minkowski vertex set
// { v + T * sum_{j in S} r_j : v in V, S subset of rays }, solved by one
// Wolfe min-norm-point run. If the ray certificate <z, r> >= -tol fails,
// the bound was binding: T doubles (capped at 2^60) and the solve repeats.
// Atoms and rays are normalized to unit scale internally; the returned
// weights refer to the inputs.
CoreResult solve_min_norm_core(const std::vector<Eigen::VectorXd>& atoms,
                               const std::vector<Eigen::VectorXd>& rays, double tol, int max_iter) {
    if (atoms.empty()) throw InputError("min-norm program needs at least one vertex");
    const Eigen::Index n = atoms.front().size();
    const int nv = static_cast<int>(atoms.size());
    const int nr = static_cast<int>(rays.size());
    if (nr >= 18 || static_cast<double>(nv) * std::pow(2.0, nr) > 2e5)
        throw InputError("min-norm ray expansion guard exceeded (too many cone rays)");

    double vertex_scale = 0.0;
    for (const auto& a : atoms) vertex_scale = std::max(vertex_scale, a.norm());
    const double scale = std::max(1.0, vertex_scale);

    Eigen::MatrixXd v(n, nv);
    for (int j = 0; j < nv; ++j) v.col(j) = atoms[static_cast<std::size_t>(j)] / scale;
    Eigen::MatrixXd r(n, nr);
    Eigen::VectorXd ray_norms(nr);
    for (int j = 0; j < nr; ++j) {
        ray_norms[j] = rays[static_cast<std::size_t>(j)].norm();
        r.col(j) = rays[static_cast<std::size_t>(j)] / ray_norms[j];
    }

    const int subsets = 1 << nr;
    Eigen::MatrixXd ray_sum(n, subsets);
    for (int s = 0; s < subsets; ++s) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < nr; ++j)
            if ((s >> j) & 1) acc += r.col(j);
        ray_sum.col(s) = acc;
    }

    CoreResult best;
    best.point = v.col(0);
    best.hull = Eigen::VectorXd::Zero(nv);
    best.hull[0] = 1.0;
    best.cone = Eigen::VectorXd::Zero(nr);
    double best_norm = std::numeric_limits<double>::infinity();

    double bound = 10.0;
    const double bound_cap = std::pow(2.0, 60);
    int budget = max_iter;
    while (budget > 0) {
        Eigen::MatrixXd augmented(n, nv * subsets);
        for (int s = 0; s < subsets; ++s)
            for (int j = 0; j < nv; ++j)
                augmented.col(s * nv + j) = v.col(j) + bound * ray_sum.col(s);

        const WolfeState ws = wolfe_min_norm(augmented, 0.5 * tol, budget);
        budget -= ws.iterations;

        Eigen::VectorXd theta = Eigen::VectorXd::Zero(nv);
        Eigen::VectorXd t = Eigen::VectorXd::Zero(nr);
        for (int s = 0; s < subsets; ++s)
            for (int j = 0; j < nv; ++j) {
                const double w = ws.weights[s * nv + j];
                if (w <= 0.0) continue;
                theta[j] += w;
                for (int k = 0; k < nr; ++k)
                    if ((s >> k) & 1) t[k] += w * bound;
            }
        const Eigen::VectorXd z = ws.point;

        if (z.norm() < best_norm) {
            best_norm = z.norm();
            best.point = z;
            best.hull = theta;
            best.cone = t;
        }

        const double zz = z.squaredNorm();
        double min_inner = std::numeric_limits<double>::infinity();
        for (int j = 0; j < nv; ++j) min_inner = std::min(min_inner, z.dot(v.col(j)));
        double ray_gap = 0.0;
        for (int j = 0; j < nr; ++j) ray_gap = std::max(ray_gap, -z.dot(r.col(j)));

        if (zz - min_inner <= tol && ray_gap <= tol) {
            best.point = z;
            best.hull = theta;
            best.cone = t;
            best.certified = true;
            break;
        }
        // A failed ray certificate means the box bound clipped the cone.
        if (ray_gap > tol && bound < bound_cap) {
            bound *= 2.0;
            continue;
        }
        break;
    }

    if (!best.certified)
        throw NumericalFailure("min-norm solver did not reach its certificate",
                               scale * best.point.norm(), scale * best.point);

    best.point *= scale;
    for (int j = 0; j < nr; ++j) best.cone[j] *= scale / ray_norms[j];
    return best;
}

MinNormResult pack_result(const CoreResult& core) {
    MinNormResult res;
    res.point = core.point;
    res.value = core.point.norm();
    res.hull_coeffs = core.hull;
    res.cone_coeffs = core.cone;
    return res;
}

} // namespace

MinNormResult min_norm_point(const Polytope& polytope, const Cone& cone, double tol, int max_iter) {
    if (tol <= 0) throw InputError("certificate tolerance must be positive");
    if (!cone.is_trivial() && cone.rays().front().size() != polytope.dimension())
        throw InputError("polytope and cone dimensions do not match");
    return pack_result(solve_min_norm_core(polytope.vertices(), cone.rays(), tol, max_iter));
}

namespace {

std::vector<std::vector<int>> sign_patterns(RabierMode mode, int m) {
    if (m > 20) throw InputError("sign-pattern enumeration limited to 20 objectives");
    std::vector<std::vector<int>> out;
    if (mode == RabierMode::PlusOnly) {
        out.emplace_back(static_cast<std::size_t>(m), +1);
        return out;
    }
    const int total = 1 << m;
    out.reserve(static_cast<std::size_t>(total));
    for (int mask = 0; mask < total; ++mask) {
        std::vector<int> pat(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) pat[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? -1 : +1;
        out.push_back(std::move(pat));
    }
    return out;
}

struct BranchAtoms {
    std::vector<Eigen::VectorXd> atoms;
    std::vector<int> owner;  // objective index per atom
};

BranchAtoms collect_atoms(const std::vector<Polytope>& plus, const std::vector<Polytope>& minus,
                          const std::vector<int>& pattern) {
    BranchAtoms ba;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const Polytope& p = pattern[i] > 0 ? plus[i] : minus[i];
        for (const auto& vtx : p.vertices()) {
            ba.atoms.push_back(vtx);
            ba.owner.push_back(static_cast<int>(i));
        }
    }
    return ba;
}

} // namespace

RabierDetail rabier_from_polytopes(const std::vector<Polytope>& plus,
                                   const std::vector<Polytope>& minus, const Cone& cone,
                                   RabierMode mode, double tol, int max_iter) {
    if (plus.empty() || plus.size() != minus.size())
        throw InputError("rabier program needs matching branch polytopes per objective");
    const int m = static_cast<int>(plus.size());
    RabierDetail best;
    best.value = std::numeric_limits<double>::infinity();
    for (const auto& pattern : sign_patterns(mode, m)) {
        const BranchAtoms ba = collect_atoms(plus, minus, pattern);
        const CoreResult core = solve_min_norm_core(ba.atoms, cone.rays(), tol, max_iter);
        const double value = core.point.norm();
        if (value < best.value) {
            best.value = value;
            best.pattern = pattern;
            best.point = core.point;
            best.cone_coeffs = core.cone;
            best.lambda = Eigen::VectorXd::Zero(m);
            for (std::size_t j = 0; j < ba.owner.size(); ++j)
                best.lambda[ba.owner[j]] += core.hull[static_cast<Eigen::Index>(j)];
        }
        if (best.value == 0.0) break;
    }
    return best;
}

namespace {

RabierDetail rabier_detail_impl(const Problem& problem, const Eigen::VectorXd& x,
                                const RabierParams& params) {
    if (!problem.feasible().contains(x, params.normal_cone.act_tol))
        throw PreconditionError("rabier function queried at an infeasible point");
    std::vector<Polytope> plus, minus;
    plus.reserve(static_cast<std::size_t>(problem.m()));
    minus.reserve(static_cast<std::size_t>(problem.m()));
    for (int i = 0; i < problem.m(); ++i) {
        plus.push_back(subdiff(problem.objective(i), x, params.calculus));
        minus.push_back(plus.back().negated());
    }
    const Cone cone = normal_cone(problem.feasible(), x, params.normal_cone);
    return rabier_from_polytopes(plus, minus, cone, params.mode, params.tol, params.max_iter);
}

} // namespace

RabierDetail rabier_nu_detail(const Problem& problem, const Eigen::VectorXd& x,
                              const RabierParams& params) {
    return rabier_detail_impl(problem, x, params);
}

double rabier_nu(const Problem& problem, const Eigen::VectorXd& x, const RabierParams& params) {
    return rabier_detail_impl(problem, x, params).value;
}

double gamma_residual(const Problem& problem, const Eigen::VectorXd& x, const RabierParams& params) {
    if (!problem.feasible().contains(x, params.normal_cone.act_tol))
        throw PreconditionError("tangency residual queried at an infeasible point");
    std::vector<Polytope> plus, minus;
    for (int i = 0; i < problem.m(); ++i) {
        plus.push_back(subdiff(problem.objective(i), x, params.calculus));
        minus.push_back(plus.back().negated());
    }
    const Cone cone = normal_cone(problem.feasible(), x, params.normal_cone);

    // The mu x term enters as one extra slot per sign of mu.
    double best = std::numeric_limits<double>::infinity();
    for (const double sigma : {+1.0, -1.0}) {
        auto plus_ext = plus;
        auto minus_ext = minus;
        plus_ext.emplace_back(std::vector<Eigen::VectorXd>{sigma * x});
        minus_ext.emplace_back(std::vector<Eigen::VectorXd>{sigma * x});
        const RabierDetail d =
            rabier_from_polytopes(plus_ext, minus_ext, cone, params.mode, params.tol, params.max_iter);
        best = std::min(best, d.value);
        if (best == 0.0) break;
    }
    return best;
}

} // namespace vodiag
