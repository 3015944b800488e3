#ifndef VODIAG_FEASIBLE_SET_HPP
#define VODIAG_FEASIBLE_SET_HPP

#include "vodiag/expression.hpp"

#include <Eigen/Core>
#include <variant>
#include <vector>

namespace vodiag {

/// Closed feasible set descriptions. All variants are immutable.
class FeasibleSet {
public:
    struct FullSpace {};

    /// Axis-aligned box; entries may be -inf/+inf for half-lines and rays.
    struct Box {
        Eigen::VectorXd lower;
        Eigen::VectorXd upper;
    };

    /// Intersection of half-spaces a_j . x <= b_j with nonzero normals.
    struct Polyhedron {
        std::vector<Eigen::VectorXd> normals;
        std::vector<double> offsets;
    };

    /// Smooth inequality constraints g_j(x) <= 0 (no Abs/Max/Min nodes).
    struct SmoothIneq {
        std::vector<Expression> constraints;
    };

    FeasibleSet() : rep_(FullSpace{}) {}

    static FeasibleSet full_space();
    static FeasibleSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);
    static FeasibleSet polyhedron(std::vector<Eigen::VectorXd> normals, std::vector<double> offsets);
    static FeasibleSet smooth_ineq(std::vector<Expression> constraints);

    bool is_full_space() const { return std::holds_alternative<FullSpace>(rep_); }
    const Box* as_box() const { return std::get_if<Box>(&rep_); }
    const Polyhedron* as_polyhedron() const { return std::get_if<Polyhedron>(&rep_); }
    const SmoothIneq* as_smooth() const { return std::get_if<SmoothIneq>(&rep_); }

    /// True iff x satisfies every constraint up to additive slack tol.
    bool contains(const Eigen::VectorXd& x, double tol) const;

    /// Worst constraint violation at x (<= 0 means feasible). FullSpace
    /// yields -inf by convention.
    double violation(const Eigen::VectorXd& x) const;

    /// Approximate Euclidean projection onto the set. Exact for FullSpace
    /// and Box; cyclic half-space projection for Polyhedron; penalty descent
    /// for SmoothIneq (best effort, callers re-check feasibility).
    Eigen::VectorXd project(const Eigen::VectorXd& x) const;

    bool same_as(const FeasibleSet& other) const;

private:
    using Rep = std::variant<FullSpace, Box, Polyhedron, SmoothIneq>;
    explicit FeasibleSet(Rep rep) : rep_(std::move(rep)) {}
    Rep rep_;
};

} // namespace vodiag

#endif
