#ifndef VODIAG_EFFICIENCY_HPP
#define VODIAG_EFFICIENCY_HPP

#include "vodiag/asymptotics.hpp"
#include "vodiag/problem.hpp"

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace vodiag {

/// Componentwise domination: y1 <= y2 with y1 != y2.
bool dominates(const Eigen::VectorXd& y1, const Eigen::VectorXd& y2);

/// Sample-based Pareto check of xbar: fails with the dominating sample if
/// some sample improves one coordinate by more than tol without worsening
/// any other; holds as evidence over the sample set otherwise.
Verdict pareto_verify(const Problem& problem, const Eigen::VectorXd& xbar,
                      const std::vector<Eigen::VectorXd>& oracle_samples, double tol);

/// Outcome of the bounded-trade-off check at level M.
struct GeoffrionReport {
    bool consistent = true;      // ConsistentUpTo(M) when true
    double M = 0.0;
    // Violation data (valid when !consistent): objective i improves at x
    // while every worsened objective j pays less than 1/M of the gain;
    // min_ratio is +inf when nothing worsens at all.
    Eigen::VectorXd x;
    int index = -1;
    double min_ratio = 0.0;
};

/// Scans the samples for a trade-off ratio above M. Requires xbar to pass
/// pareto_verify on the same samples (PreconditionError otherwise). Only
/// violations are certificates; consistency is evidence up to the samples.
GeoffrionReport geoffrion_check(const Problem& problem, const Eigen::VectorXd& xbar, double M,
                                const std::vector<Eigen::VectorXd>& oracle_samples, double tol);

struct ScalarizationConfig {
    Eigen::VectorXd lambda;          // strictly positive weights
    SublevelBound ybar;
    Eigen::VectorXd box_lower;       // finite search box
    Eigen::VectorXd box_upper;
    int starts = 64;
    int max_steps = 400;
    double tol = 1e-7;
    double grid_step = 1e-3;         // verification grid resolution
    std::uint64_t seed = 0;
    int threads = 1;

    ScalarizationConfig(Eigen::VectorXd lambda, SublevelBound ybar, Eigen::VectorXd box_lower,
                        Eigen::VectorXd box_upper)
        : lambda(std::move(lambda)), ybar(std::move(ybar)), box_lower(std::move(box_lower)),
          box_upper(std::move(box_upper)) {}
};

struct ScalarizeResult {
    Eigen::VectorXd x;
    Eigen::VectorXd f;
    double objective = 0.0;          // <lambda, f(x)>
    Verdict pareto;
};

/// Weighted scalarization over the sublevel-restricted feasible set:
/// multi-start projected descent on <lambda, f> with quadratic penalties for
/// smooth and sublevel constraints, a feasibility repair polish, and a grid
/// Pareto verification of the winner. Throws PreconditionError when no
/// start reaches the sublevel set (empty-sublevel evidence).
ScalarizeResult scalarize_solve(const Problem& problem, const ScalarizationConfig& config);

struct FrontEntry {
    Eigen::VectorXd lambda;
    Eigen::VectorXd x;
    Eigen::VectorXd f;
};

struct ParetoFront {
    std::vector<FrontEntry> entries;
    std::vector<std::string> failures;   // per-weight failures, not fatal
};

/// Maps scalarize_solve over the weight grid, deduplicates by image within
/// cluster_radius and keeps only verified points.
ParetoFront pareto_front(const Problem& problem, const std::vector<Eigen::VectorXd>& lambda_grid,
                         const ScalarizationConfig& config, double cluster_radius = 1e-2);

struct RecessionParams {
    double norm_floor = 10.0;        // ignore images below this norm
    double direction_tol = 1e-3;     // tolerance for the d <= 0 witness test
    double cluster_radius = 5e-2;    // direction clustering radius
    int min_persist_shells = 3;
    ProbeParams probe;
};

/// Recession-direction estimate of the image set: normalized images of
/// feasible samples clustered across shells. eq8_holds is false with a
/// witness when some persistent direction is (within direction_tol)
/// componentwise nonpositive, refuting the necessary condition for
/// bounded-trade-off solutions to exist.
struct RecessionReport {
    std::vector<Eigen::VectorXd> directions;
    bool eq8_holds = true;
    std::optional<Eigen::VectorXd> witness;
};

RecessionReport recession_probe(const Problem& problem, const RadiusSchedule& schedule,
                                std::uint64_t seed, const RecessionParams& params = {});

/// Composite existence report: the recession necessary condition plus
/// global properness/bounded-section evidence at a grid of sublevel bounds,
/// critical-cloud inclusion diagnostics, and an exhibited scalarization
/// point checked for bounded trade-offs when the evidence holds.
struct ExistenceReport {
    RecessionReport recession;

    struct SectionProbe {
        Eigen::VectorXd ybar;
        bool section_bounded = false;
        bool proper = false;
    };
    std::vector<SectionProbe> sections;

    struct InclusionCheck {
        std::string cloud;
        int candidates = 0;
        int matched = 0;   // candidates matched in the critical cloud
    };
    std::vector<InclusionCheck> inclusions;

    bool necessary_refuted = false;
    bool sufficient_evidence = false;
    std::optional<ScalarizeResult> exhibited;
    double exhibited_M = 0.0;
    bool exhibited_consistent = false;
    std::string summary;
};

ExistenceReport geoffrion_existence_report(const Problem& problem, const RadiusSchedule& schedule,
                                           RabierMode mode, std::uint64_t seed,
                                           const Eigen::VectorXd& box_lower = {},
                                           const Eigen::VectorXd& box_upper = {});

} // namespace vodiag

#endif
