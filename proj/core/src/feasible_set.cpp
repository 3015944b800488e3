#include "vodiag/feasible_set.hpp"

#include "vodiag/errors.hpp"

#include <cmath>
#include <limits>

namespace vodiag {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

FeasibleSet FeasibleSet::full_space() { return FeasibleSet(FullSpace{}); }

FeasibleSet FeasibleSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
    if (lower.size() != upper.size()) throw InputError("box bounds have mismatched dimensions");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (std::isnan(lower[i]) || std::isnan(upper[i]))
            throw InputError("box bounds must not be NaN");
        if (lower[i] > upper[i])
            throw InputError("box lower bound exceeds upper bound in coordinate " + std::to_string(i + 1));
    }
    return FeasibleSet(Box{std::move(lower), std::move(upper)});
}

FeasibleSet FeasibleSet::polyhedron(std::vector<Eigen::VectorXd> normals, std::vector<double> offsets) {
    if (normals.size() != offsets.size()) throw InputError("polyhedron rows mismatched");
    if (normals.empty()) throw InputError("polyhedron needs at least one row");
    const Eigen::Index n = normals.front().size();
    for (const auto& a : normals) {
        if (a.size() != n) throw InputError("polyhedron normals have mismatched dimensions");
        if (a.norm() == 0.0) throw InputError("polyhedron normal vector must be nonzero");
    }
    return FeasibleSet(Polyhedron{std::move(normals), std::move(offsets)});
}

FeasibleSet FeasibleSet::smooth_ineq(std::vector<Expression> constraints) {
    if (constraints.empty()) throw InputError("smooth constraint list must be nonempty");
    for (const auto& g : constraints)
        if (!g.is_smooth())
            throw InputError("smooth constraints must not contain abs/max/min nodes");
    return FeasibleSet(SmoothIneq{std::move(constraints)});
}

bool FeasibleSet::contains(const Eigen::VectorXd& x, double tol) const {
    if (tol < 0) throw InputError("feasibility slack must be nonnegative");
    return violation(x) <= tol;
}

double FeasibleSet::violation(const Eigen::VectorXd& x) const {
    if (is_full_space()) return -kInf;
    if (const Box* b = as_box()) {
        if (b->lower.size() != x.size()) throw InputError("point dimension does not match box");
        double worst = -kInf;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (b->lower[i] > -kInf) worst = std::max(worst, b->lower[i] - x[i]);
            if (b->upper[i] < kInf) worst = std::max(worst, x[i] - b->upper[i]);
        }
        return worst;
    }
    if (const Polyhedron* p = as_polyhedron()) {
        if (p->normals.front().size() != x.size())
            throw InputError("point dimension does not match polyhedron");
        double worst = -kInf;
        for (std::size_t j = 0; j < p->normals.size(); ++j)
            worst = std::max(worst, p->normals[j].dot(x) - p->offsets[j]);
        return worst;
    }
    const SmoothIneq* s = as_smooth();
    double worst = -kInf;
    for (const auto& g : s->constraints) worst = std::max(worst, g.eval(x));
    return worst;
}

Eigen::VectorXd FeasibleSet::project(const Eigen::VectorXd& x) const {
    if (is_full_space()) return x;
    if (const Box* b = as_box()) {
        Eigen::VectorXd y = x;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y[i] = std::min(std::max(y[i], b->lower[i]), b->upper[i]);
        return y;
    }
    if (const Polyhedron* p = as_polyhedron()) {
        // Cyclic projection onto violated half-spaces. Converges to a point
        // of the intersection; for a single row it is the exact projection.
        Eigen::VectorXd y = x;
        for (int pass = 0; pass < 64; ++pass) {
            double worst = -kInf;
            for (std::size_t j = 0; j < p->normals.size(); ++j) {
                const double slack = p->normals[j].dot(y) - p->offsets[j];
                worst = std::max(worst, slack);
                if (slack > 0) y -= (slack / p->normals[j].squaredNorm()) * p->normals[j];
            }
            if (worst <= 1e-12) break;
        }
        return y;
    }
    // SmoothIneq: gradient descent on the squared hinge of the violations.
    const SmoothIneq* s = as_smooth();
    Eigen::VectorXd y = x;
    const double fd = 1e-6;
    for (int iter = 0; iter < 200; ++iter) {
        const double v = violation(y);
        if (v <= 0) break;
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(y.size());
        for (const auto& g : s->constraints) {
            const double gv = g.eval(y);
            if (gv <= 0) continue;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                Eigen::VectorXd yp = y, ym = y;
                yp[i] += fd;
                ym[i] -= fd;
                grad[i] += 2.0 * gv * (g.eval(yp) - g.eval(ym)) / (2 * fd);
            }
        }
        const double gn = grad.norm();
        if (gn < 1e-14) break;
        double step = v / gn;
        Eigen::VectorXd trial = y - step * grad / gn;
        for (int bt = 0; bt < 20 && violation(trial) >= v; ++bt) {
            step *= 0.5;
            trial = y - step * grad / gn;
        }
        if (violation(trial) >= v) break;
        y = trial;
    }
    return y;
}

bool FeasibleSet::same_as(const FeasibleSet& other) const {
    if (rep_.index() != other.rep_.index()) return false;
    if (is_full_space()) return true;
    if (const Box* b = as_box()) {
        const Box* o = other.as_box();
        return b->lower.size() == o->lower.size() && b->lower == o->lower && b->upper == o->upper;
    }
    if (const Polyhedron* p = as_polyhedron()) {
        const Polyhedron* o = other.as_polyhedron();
        if (p->normals.size() != o->normals.size()) return false;
        for (std::size_t j = 0; j < p->normals.size(); ++j)
            if (p->normals[j] != o->normals[j] || p->offsets[j] != o->offsets[j]) return false;
        return true;
    }
    const SmoothIneq* s = as_smooth();
    const SmoothIneq* o = other.as_smooth();
    if (s->constraints.size() != o->constraints.size()) return false;
    for (std::size_t j = 0; j < s->constraints.size(); ++j)
        if (!s->constraints[j].same_as(o->constraints[j])) return false;
    return true;
}

} // namespace vodiag
