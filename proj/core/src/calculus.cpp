#include "vodiag/calculus.hpp"

#include "vodiag/errors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace vodiag {

namespace {

bool nearly_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
    return (a - b).lpNorm<Eigen::Infinity>() <= tol;
}

std::vector<Eigen::VectorXd> dedup(std::vector<Eigen::VectorXd> vs) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(vs.size());
    for (auto& v : vs) {
        bool seen = false;
        for (const auto& w : out) {
            const double scale = 1.0 + std::max(v.lpNorm<Eigen::Infinity>(), w.lpNorm<Eigen::Infinity>());
            if (nearly_equal(v, w, 1e-12 * scale)) {
                seen = true;
                break;
            }
        }
        if (!seen) out.push_back(std::move(v));
    }
    return out;
}

} // namespace

Polytope::Polytope(std::vector<Eigen::VectorXd> vertices) {
    if (vertices.empty()) throw InputError("polytope needs at least one vertex");
    const Eigen::Index dim = vertices.front().size();
    for (const auto& v : vertices)
        if (v.size() != dim) throw InputError("polytope vertices have mismatched dimensions");
    vertices_ = dedup(std::move(vertices));
}

Polytope Polytope::negated() const {
    std::vector<Eigen::VectorXd> out;
    out.reserve(vertices_.size());
    for (const auto& v : vertices_) out.push_back(-v);
    return Polytope(std::move(out));
}

Polytope Polytope::scaled(double factor) const {
    std::vector<Eigen::VectorXd> out;
    out.reserve(vertices_.size());
    for (const auto& v : vertices_) out.push_back(factor * v);
    return Polytope(std::move(out));
}

bool Polytope::has_vertex(const Eigen::VectorXd& v, double tol) const {
    for (const auto& w : vertices_)
        if (nearly_equal(v, w, tol)) return true;
    return false;
}

Cone::Cone(std::vector<Eigen::VectorXd> rays) : rays_(std::move(rays)) {
    if (rays_.empty()) return;
    const Eigen::Index dim = rays_.front().size();
    for (const auto& r : rays_) {
        if (r.size() != dim) throw InputError("cone rays have mismatched dimensions");
        if (r.norm() == 0.0) throw InputError("cone rays must be nonzero");
    }
}

namespace {

// Minkowski sum of two vertex sets.
std::vector<Eigen::VectorXd> minkowski(const std::vector<Eigen::VectorXd>& a,
                                       const std::vector<Eigen::VectorXd>& b) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(a.size() * b.size());
    for (const auto& va : a)
        for (const auto& vb : b) out.push_back(va + vb);
    return dedup(std::move(out));
}

std::vector<Eigen::VectorXd> scale_all(const std::vector<Eigen::VectorXd>& a, double c) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(a.size());
    for (const auto& v : a) out.push_back(c * v);
    return out;
}

// Lipschitz product rule over vertex pairs: conv{ u*q + v*p }.
std::vector<Eigen::VectorXd> product_rule(double u_val, const std::vector<Eigen::VectorXd>& pu,
                                          double v_val, const std::vector<Eigen::VectorXd>& pv) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(pu.size() * pv.size());
    for (const auto& p : pu)
        for (const auto& q : pv) out.push_back(u_val * q + v_val * p);
    return dedup(std::move(out));
}

struct SubdiffResult {
    double value;
    std::vector<Eigen::VectorXd> vertices;
};

SubdiffResult subdiff_rec(const Expression& e, const Eigen::VectorXd& x, double tie_tol);

SubdiffResult max_like(const std::vector<Expression>& children, const Eigen::VectorXd& x,
                       double tie_tol, bool is_max) {
    std::vector<double> vals(children.size());
    for (std::size_t i = 0; i < children.size(); ++i) vals[i] = children[i].eval(x);
    const double extreme = is_max ? *std::max_element(vals.begin(), vals.end())
                                  : *std::min_element(vals.begin(), vals.end());
    std::vector<Eigen::VectorXd> verts;
    for (std::size_t i = 0; i < children.size(); ++i) {
        const bool active = is_max ? vals[i] >= extreme - tie_tol : vals[i] <= extreme + tie_tol;
        if (!active) continue;
        auto child = subdiff_rec(children[i], x, tie_tol);
        for (auto& v : child.vertices) verts.push_back(std::move(v));
    }
    return {extreme, dedup(std::move(verts))};
}

SubdiffResult subdiff_rec(const Expression& e, const Eigen::VectorXd& x, double tie_tol) {
    const auto& n = e.node();
    const auto zero = [&] { return Eigen::VectorXd::Zero(x.size()).eval(); };
    switch (n.kind) {
        case NodeKind::Constant:
            return {n.value, {zero()}};
        case NodeKind::Variable: {
            Eigen::VectorXd g = zero();
            if (n.index >= x.size()) throw InputError("variable index out of range");
            g[n.index] = 1.0;
            return {x[n.index], {std::move(g)}};
        }
        case NodeKind::Add: {
            SubdiffResult acc = subdiff_rec(n.children[0], x, tie_tol);
            for (std::size_t i = 1; i < n.children.size(); ++i) {
                auto next = subdiff_rec(n.children[i], x, tie_tol);
                acc.value += next.value;
                acc.vertices = minkowski(acc.vertices, next.vertices);
            }
            return acc;
        }
        case NodeKind::Mul: {
            SubdiffResult acc = subdiff_rec(n.children[0], x, tie_tol);
            for (std::size_t i = 1; i < n.children.size(); ++i) {
                auto next = subdiff_rec(n.children[i], x, tie_tol);
                acc.vertices = product_rule(acc.value, acc.vertices, next.value, next.vertices);
                acc.value *= next.value;
            }
            return acc;
        }
        case NodeKind::Neg: {
            auto child = subdiff_rec(n.children[0], x, tie_tol);
            return {-child.value, scale_all(child.vertices, -1.0)};
        }
        case NodeKind::IntPow: {
            auto child = subdiff_rec(n.children[0], x, tie_tol);
            if (n.exponent == 0) return {1.0, {zero()}};
            double pow_km1 = 1.0;
            for (int k = 0; k < n.exponent - 1; ++k) pow_km1 *= child.value;
            const double outer = static_cast<double>(n.exponent) * pow_km1;
            return {pow_km1 * child.value, scale_all(child.vertices, outer)};
        }
        case NodeKind::Sin: {
            auto child = subdiff_rec(n.children[0], x, tie_tol);
            return {std::sin(child.value), scale_all(child.vertices, std::cos(child.value))};
        }
        case NodeKind::Cos: {
            auto child = subdiff_rec(n.children[0], x, tie_tol);
            return {std::cos(child.value), scale_all(child.vertices, -std::sin(child.value))};
        }
        case NodeKind::Exp: {
            auto child = subdiff_rec(n.children[0], x, tie_tol);
            return {std::exp(child.value), scale_all(child.vertices, std::exp(child.value))};
        }
        case NodeKind::Abs: {
            // abs(u) is differentiated as max(u, -u).
            std::vector<Expression> branches{n.children[0], Expression::neg(n.children[0])};
            return max_like(branches, x, tie_tol, /*is_max=*/true);
        }
        case NodeKind::Max:
            return max_like(n.children, x, tie_tol, /*is_max=*/true);
        case NodeKind::Min:
            // min(u_1,...) = -max(-u_1,...); with the structural identity
            // P(-u) = -P(u) this reduces to the hull of the argmin branches.
            return max_like(n.children, x, tie_tol, /*is_max=*/false);
    }
    throw Error("corrupt expression node");
}

} // namespace

Polytope subdiff(const Expression& expr, const Eigen::VectorXd& x, const CalculusParams& params) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i])) throw InputError("subdifferential point must be finite");
    return Polytope(subdiff_rec(expr, x, params.tie_tol).vertices);
}

Polytope neg_subdiff(const Expression& expr, const Eigen::VectorXd& x, const CalculusParams& params) {
    return subdiff(Expression::neg(expr), x, params);
}

Cone normal_cone(const FeasibleSet& set, const Eigen::VectorXd& x, const NormalConeParams& params) {
    if (!set.contains(x, params.act_tol))
        throw PreconditionError("normal cone queried at an infeasible point");

    if (set.is_full_space()) return Cone{};

    std::vector<Eigen::VectorXd> rays;
    if (const auto* b = set.as_box()) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (b->upper[i] < std::numeric_limits<double>::infinity() &&
                x[i] >= b->upper[i] - params.act_tol) {
                Eigen::VectorXd r = Eigen::VectorXd::Zero(x.size());
                r[i] = 1.0;
                rays.push_back(std::move(r));
            }
            if (b->lower[i] > -std::numeric_limits<double>::infinity() &&
                x[i] <= b->lower[i] + params.act_tol) {
                Eigen::VectorXd r = Eigen::VectorXd::Zero(x.size());
                r[i] = -1.0;
                rays.push_back(std::move(r));
            }
        }
        return Cone(std::move(rays));
    }

    if (const auto* p = set.as_polyhedron()) {
        for (std::size_t j = 0; j < p->normals.size(); ++j)
            if (p->normals[j].dot(x) >= p->offsets[j] - params.act_tol)
                rays.push_back(p->normals[j]);
        return Cone(std::move(rays));
    }

    const auto* s = set.as_smooth();
    CalculusParams cp;
    for (const auto& g : s->constraints) {
        if (g.eval(x) < -params.act_tol) continue;
        const Polytope grad = subdiff(g, x, cp);
        // Smooth constraints yield singleton gradients.
        const Eigen::VectorXd& gv = grad.vertices().front();
        if (gv.norm() <= params.rank_tol)
            throw DegenerateConstraintError("active smooth constraint has (near) zero gradient");
        rays.push_back(gv);
    }
    if (rays.size() > 1) {
        Eigen::MatrixXd g(x.size(), static_cast<Eigen::Index>(rays.size()));
        for (std::size_t j = 0; j < rays.size(); ++j) g.col(static_cast<Eigen::Index>(j)) = rays[j];
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
        qr.setThreshold(params.rank_tol);
        if (qr.rank() < static_cast<Eigen::Index>(rays.size()))
            throw DegenerateConstraintError(
                "active smooth constraint gradients are linearly dependent");
    }
    return Cone(std::move(rays));
}

} // namespace vodiag
