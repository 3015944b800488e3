#ifndef VODIAG_PROBLEM_HPP
#define VODIAG_PROBLEM_HPP

#include "vodiag/expression.hpp"
#include "vodiag/feasible_set.hpp"

#include <Eigen/Core>
#include <vector>

namespace vodiag {

/// Componentwise objective bound in (R u {+inf})^m. All-infinite entries
/// select the unrestricted variants of the asymptotic sets.
class SublevelBound {
public:
    explicit SublevelBound(Eigen::VectorXd values);
    static SublevelBound unrestricted(int m);

    const Eigen::VectorXd& values() const { return values_; }
    int dimension() const { return static_cast<int>(values_.size()); }
    bool is_unrestricted() const;
    bool all_finite() const;

    /// Euclidean norm over the finite entries only.
    double finite_norm() const;

private:
    Eigen::VectorXd values_;
};

/// A constrained vector optimization instance: minimize the m objectives
/// componentwise over the feasible set, n input variables.
class Problem {
public:
    Problem(int n, int m, std::vector<Expression> objectives, FeasibleSet feasible);

    int n() const { return n_; }
    int m() const { return m_; }
    const std::vector<Expression>& objectives() const { return objectives_; }
    const Expression& objective(int i) const { return objectives_[static_cast<std::size_t>(i)]; }
    const FeasibleSet& feasible() const { return feasible_; }

    /// Pointwise image (f_1(x), ..., f_m(x)).
    Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

    /// True iff x is feasible and f_i(x) <= ybar_i + tol for all i.
    bool sublevel_member(const SublevelBound& ybar, const Eigen::VectorXd& x, double tol) const;

    /// max over i of f_i(x) - ybar_i over the finite entries; -inf when
    /// all entries are infinite. Nonpositive means inside the sublevel set.
    double sublevel_violation(const SublevelBound& ybar, const Eigen::VectorXd& x) const;

    bool same_as(const Problem& other) const;

private:
    int n_;
    int m_;
    std::vector<Expression> objectives_;
    FeasibleSet feasible_;
};

/// True iff x satisfies every constraint of the set up to additive slack tol.
bool is_feasible(const FeasibleSet& set, const Eigen::VectorXd& x, double tol);

} // namespace vodiag

#endif
