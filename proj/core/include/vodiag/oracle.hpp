#ifndef VODIAG_ORACLE_HPP
#define VODIAG_ORACLE_HPP

#include "vodiag/calculus.hpp"
#include "vodiag/problem.hpp"

#include <Eigen/Core>
#include <vector>

namespace vodiag {

/// Rectangular evaluation grid. Guarded to at most 1e7 points.
struct GridSpec {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::vector<int> steps;   // point counts per dimension, >= 2

    static GridSpec from_step(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                              double step);
    void validate() const;
    std::size_t total() const;
};

/// All grid points, row-major over dimensions.
std::vector<Eigen::VectorXd> grid_points(const GridSpec& spec);

/// Grid points feasible within tol.
std::vector<Eigen::VectorXd> feasible_grid_points(const Problem& problem, const GridSpec& spec,
                                                  double tol);

/// Exhaustive nondominated subset of the feasible grid: every returned
/// point's image is undominated by every other feasible grid image.
/// Deliberately independent of the solver code paths.
std::vector<Eigen::VectorXd> grid_pareto(const Problem& problem, const GridSpec& spec,
                                         double feas_tol = 1e-9);

/// Brute-force upper bound on min ||z|| over conv(vertices) + cone: full
/// enumeration of the vertex-weight simplex at resolution lambda_step and of
/// ray coefficients on a uniform grid over [0, ray_cap]. The gap to the
/// true distance is Lipschitz-controlled by the grid resolutions. Guarded
/// against oversized enumerations.
double brute_min_norm(const Polytope& polytope, const Cone& cone, double lambda_step,
                      double ray_cap);

} // namespace vodiag

#endif
