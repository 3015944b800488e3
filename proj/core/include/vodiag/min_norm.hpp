#ifndef VODIAG_MIN_NORM_HPP
#define VODIAG_MIN_NORM_HPP

#include "vodiag/calculus.hpp"
#include "vodiag/problem.hpp"

#include <Eigen/Core>
#include <vector>

namespace vodiag {

/// Solution of min ||z|| over conv(vertices) + cone(rays).
struct MinNormResult {
    double value = 0.0;            // ||point||
    Eigen::VectorXd point;         // attaining z*
    Eigen::VectorXd hull_coeffs;   // convex weights over the polytope vertices
    Eigen::VectorXd cone_coeffs;   // nonnegative weights over the cone rays
};

/// Which subgradient branches enter the Rabier program: Full uses
/// d f_i and d(-f_i) per objective, PlusOnly drops the d(-f_i) terms.
enum class RabierMode { Full, PlusOnly };

/// Minimum-norm point of conv(vertices) + cone.
///
/// Solved by alternating two exact finite subsolvers: Wolfe's min-norm-point
/// algorithm on the shifted vertex simplex and Lawson-Hanson NNLS on the ray
/// coefficients, with a joint active-face refinement between rounds. The
/// returned point satisfies the duality-gap certificate
///     min_v <z, v> >= ||z||^2 - tol * max(1, max_v ||v||)^2
///     <z, r>       >= -tol * ||r|| for every ray r,
/// i.e. tol is enforced on data normalized to unit vertex scale. Throws
/// NumericalFailure carrying the best iterate if the certificate cannot be
/// met within max_iter inner iterations.
MinNormResult min_norm_point(const Polytope& polytope, const Cone& cone, double tol,
                             int max_iter = 10000);

/// Rabier program solution with the attaining multipliers.
struct RabierDetail {
    double value = 0.0;
    std::vector<int> pattern;      // +1 -> d f_i branch, -1 -> d(-f_i) branch
    Eigen::VectorXd lambda;        // per-objective simplex weights
    Eigen::VectorXd point;         // attaining z*
    Eigen::VectorXd cone_coeffs;   // weights over the normal cone rays
};

struct RabierParams {
    RabierMode mode = RabierMode::Full;
    double tol = 1e-9;
    int max_iter = 10000;
    CalculusParams calculus;
    NormalConeParams normal_cone;
};

/// Extended Rabier function: distance from the origin to the set of
/// unit-sum nonnegative combinations of per-objective subgradients plus the
/// normal cone at x. One min-norm program is solved per sign pattern
/// (2^m in Full mode); the union-of-branches program is converted to hull
/// programs by the simplex identity conv(U_i S_i) = U_{lambda} sum lambda_i S_i.
/// The value is computed against the calculus module over-approximations and
/// is therefore a lower bound on the true function, exact for smooth
/// objectives. Throws PreconditionError at infeasible points.
double rabier_nu(const Problem& problem, const Eigen::VectorXd& x, const RabierParams& params = {});

/// Same, with the attaining sign pattern and multipliers.
RabierDetail rabier_nu_detail(const Problem& problem, const Eigen::VectorXd& x,
                              const RabierParams& params = {});

/// Rabier program over explicit per-objective branch polytopes, one entry
/// per objective in plus (d f_i) and minus (d(-f_i)). Used by diagnostics
/// and by oracle-equivalence tests.
RabierDetail rabier_from_polytopes(const std::vector<Polytope>& plus,
                                   const std::vector<Polytope>& minus, const Cone& cone,
                                   RabierMode mode, double tol, int max_iter = 10000);

/// Distance from the origin to the tangency program set
///   { sum_i lambda_i v_i + mu x + w : lambda >= 0, sum lambda_i + |mu| = 1,
///     v_i in the chosen branch polytopes, w in N(x; Omega) }.
/// The mu slot is split by sign into two extra hull programs with the
/// singleton vertex {x} respectively {-x}; keeping both signed vertices in
/// one hull would let the segment [-x, x] absorb the origin and collapse
/// the residual to zero. Membership in the tangency set is declared by
/// comparing this residual against a threshold (gamma_tol, default 1e-6).
double gamma_residual(const Problem& problem, const Eigen::VectorXd& x,
                      const RabierParams& params = {});

} // namespace vodiag

#endif
