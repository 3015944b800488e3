#ifndef VODIAG_DESCENT_HPP
#define VODIAG_DESCENT_HPP

#include "vodiag/feasible_set.hpp"

#include <Eigen/Core>
#include <functional>

namespace vodiag {

/// Search region for the local descent helper: an optional bounding box,
/// an optional norm shell ||x|| in [shell_lo, shell_hi], and an optional
/// feasible set handled by (approximate) projection.
struct DescentRegion {
    const FeasibleSet* feasible = nullptr;
    Eigen::VectorXd box_lower;   // empty = unbounded
    Eigen::VectorXd box_upper;
    double shell_lo = 0.0;
    double shell_hi = 0.0;       // <= 0 disables the shell

    Eigen::VectorXd project(Eigen::VectorXd x) const;
};

struct DescentOptions {
    int max_steps = 200;
    double initial_step = 1.0;
    double fd_step = 1e-5;
    double step_floor = 1e-13;
    int polish_rounds = 2;
    double polish_bracket = 0.5;
    int polish_iters = 80;
};

struct DescentResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int steps = 0;
};

/// Projected finite-difference descent with Armijo backtracking followed by
/// coordinate-wise golden-section polish. The objective may be nonsmooth;
/// the polish phase resolves kinks the gradient phase stalls on. Iterates
/// always stay inside the region; when `accept` is given, steps leaving the
/// accepted set are rejected.
DescentResult descend(const std::function<double(const Eigen::VectorXd&)>& objective,
                      Eigen::VectorXd start, const DescentRegion& region,
                      const DescentOptions& opts = {},
                      const std::function<bool(const Eigen::VectorXd&)>& accept = {});

} // namespace vodiag

#endif
