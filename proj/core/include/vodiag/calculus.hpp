#ifndef VODIAG_CALCULUS_HPP
#define VODIAG_CALCULUS_HPP

#include "vodiag/expression.hpp"
#include "vodiag/feasible_set.hpp"

#include <Eigen/Core>
#include <vector>

namespace vodiag {

/// Convex hull of a nonempty finite vertex list. Duplicate vertices are
/// merged on construction; vertices are not reduced to extreme points,
/// which keeps tie-tolerance monotonicity literal on vertex sets.
class Polytope {
public:
    explicit Polytope(std::vector<Eigen::VectorXd> vertices);

    const std::vector<Eigen::VectorXd>& vertices() const { return vertices_; }
    int dimension() const { return static_cast<int>(vertices_.front().size()); }
    std::size_t size() const { return vertices_.size(); }

    Polytope negated() const;
    Polytope scaled(double factor) const;

    /// True if some vertex equals v within tol (infinity norm).
    bool has_vertex(const Eigen::VectorXd& v, double tol) const;

private:
    std::vector<Eigen::VectorXd> vertices_;
};

/// Finitely generated cone { sum_j t_j r_j : t_j >= 0 }. An empty ray list
/// is the trivial cone {0}. Rays must be nonzero.
class Cone {
public:
    Cone() = default;
    explicit Cone(std::vector<Eigen::VectorXd> rays);

    const std::vector<Eigen::VectorXd>& rays() const { return rays_; }
    bool is_trivial() const { return rays_.empty(); }

private:
    std::vector<Eigen::VectorXd> rays_;
};

struct CalculusParams {
    /// Activity tolerance for max/min branch ties.
    double tie_tol = 1e-9;
};

/// Polyhedral over-approximation of the limiting subdifferential of expr
/// at x, exact (a singleton gradient) when no max/min branch is tied.
/// Sum nodes take Minkowski sums, max nodes take hulls of tied branches,
/// min routes through -max(-.), abs is treated as max(u, -u), and products
/// use the Lipschitz product rule over vertex pairs.
Polytope subdiff(const Expression& expr, const Eigen::VectorXd& x, const CalculusParams& params = {});

/// Over-approximation of the subdifferential of -expr at x. Equals the
/// vertexwise negation of subdiff(expr, x).
Polytope neg_subdiff(const Expression& expr, const Eigen::VectorXd& x, const CalculusParams& params = {});

struct NormalConeParams {
    /// Activity tolerance for constraints.
    double act_tol = 1e-9;
    /// Rank threshold for the linear-independence qualification of active
    /// smooth constraint gradients.
    double rank_tol = 1e-8;
};

/// Limiting normal cone of the feasible set at x, as ray generators.
/// Exact for FullSpace, Box and convex polyhedra; for smooth inequality
/// sets the active-gradient formula is used and requires the active
/// gradients to be linearly independent (otherwise a
/// DegenerateConstraintError is thrown). Throws PreconditionError if x is
/// not feasible within act_tol.
Cone normal_cone(const FeasibleSet& set, const Eigen::VectorXd& x, const NormalConeParams& params = {});

} // namespace vodiag

#endif
