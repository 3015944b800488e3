#include "vodiag/problem.hpp"

#include "vodiag/errors.hpp"

#include <cmath>
#include <limits>

namespace vodiag {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SublevelBound::SublevelBound(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() == 0) throw InputError("sublevel bound must have at least one entry");
    for (Eigen::Index i = 0; i < values_.size(); ++i)
        if (std::isnan(values_[i]) || values_[i] == -kInf)
            throw InputError("sublevel entries must be finite reals or +inf");
}

SublevelBound SublevelBound::unrestricted(int m) {
    return SublevelBound(Eigen::VectorXd::Constant(m, kInf));
}

bool SublevelBound::is_unrestricted() const {
    return (values_.array() == kInf).all();
}

bool SublevelBound::all_finite() const {
    return (values_.array() < kInf).all();
}

double SublevelBound::finite_norm() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < values_.size(); ++i)
        if (values_[i] < kInf) s += values_[i] * values_[i];
    return std::sqrt(s);
}

Problem::Problem(int n, int m, std::vector<Expression> objectives, FeasibleSet feasible)
    : n_(n), m_(m), objectives_(std::move(objectives)), feasible_(std::move(feasible)) {
    if (n_ <= 0) throw InputError("problem dimension n must be positive");
    if (m_ <= 0) throw InputError("objective count m must be positive");
    if (static_cast<int>(objectives_.size()) != m_)
        throw InputError("expected " + std::to_string(m_) + " objectives, got " +
                         std::to_string(objectives_.size()));
    for (const auto& f : objectives_)
        if (f.min_dimension() > n_)
            throw InputError("objective references variable beyond dimension n");
    if (const auto* b = feasible_.as_box()) {
        if (b->lower.size() != n_) throw InputError("box constraint dimension does not match n");
    } else if (const auto* p = feasible_.as_polyhedron()) {
        if (p->normals.front().size() != n_)
            throw InputError("polyhedron constraint dimension does not match n");
    } else if (const auto* s = feasible_.as_smooth()) {
        for (const auto& g : s->constraints)
            if (g.min_dimension() > n_)
                throw InputError("smooth constraint references variable beyond dimension n");
    }
}

Eigen::VectorXd Problem::evaluate(const Eigen::VectorXd& x) const {
    if (x.size() != n_)
        throw InputError("point dimension " + std::to_string(x.size()) +
                         " does not match problem dimension " + std::to_string(n_));
    Eigen::VectorXd y(m_);
    for (int i = 0; i < m_; ++i) y[i] = objectives_[static_cast<std::size_t>(i)].eval(x);
    return y;
}

double Problem::sublevel_violation(const SublevelBound& ybar, const Eigen::VectorXd& x) const {
    if (ybar.dimension() != m_) throw InputError("sublevel bound dimension does not match m");
    double worst = -kInf;
    for (int i = 0; i < m_; ++i) {
        const double bound = ybar.values()[i];
        if (bound == kInf) continue;
        worst = std::max(worst, objectives_[static_cast<std::size_t>(i)].eval(x) - bound);
    }
    return worst;
}

bool Problem::sublevel_member(const SublevelBound& ybar, const Eigen::VectorXd& x, double tol) const {
    if (tol < 0) throw InputError("tolerance must be nonnegative");
    if (!feasible_.contains(x, tol)) return false;
    return sublevel_violation(ybar, x) <= tol;
}

bool Problem::same_as(const Problem& other) const {
    if (n_ != other.n_ || m_ != other.m_) return false;
    for (int i = 0; i < m_; ++i)
        if (!objectives_[static_cast<std::size_t>(i)].same_as(other.objectives_[static_cast<std::size_t>(i)]))
            return false;
    return feasible_.same_as(other.feasible_);
}

bool is_feasible(const FeasibleSet& set, const Eigen::VectorXd& x, double tol) {
    return set.contains(x, tol);
}

} // namespace vodiag
