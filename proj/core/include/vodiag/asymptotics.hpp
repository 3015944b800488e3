#ifndef VODIAG_ASYMPTOTICS_HPP
#define VODIAG_ASYMPTOTICS_HPP

#include "vodiag/min_norm.hpp"
#include "vodiag/problem.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vodiag {

/// Strictly increasing shell radii plus the per-shell sample budget.
/// Shell k covers norms in [radii[k], radii[k+1]), the last shell extending
/// by the trailing ratio.
struct RadiusSchedule {
    std::vector<double> radii;
    int samples_per_shell = 256;

    /// Geometric schedule r0*rho^k for k = 1..count.
    static RadiusSchedule geometric(double r0 = 1.0, double rho = 2.0, int count = 20,
                                    int samples_per_shell = 256);

    void validate() const;
    int shells() const { return static_cast<int>(radii.size()); }
    double shell_upper(int k) const;
};

/// One evaluated sample point with everything needed to replay it.
struct SampleRecord {
    Eigen::VectorXd x;
    double norm_x = 0.0;
    Eigen::VectorXd f;
    int shell = -1;
    double nu = std::numeric_limits<double>::quiet_NaN();
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double statistic = std::numeric_limits<double>::quiet_NaN();
};

/// A clustered candidate limit value in objective space.
struct CloudCandidate {
    Eigen::VectorXd y;
    double best_residual = 0.0;
    std::vector<SampleRecord> witness;
    int shell_span = 0;
    int max_shell = -1;
};

/// Numerical stand-in for the asymptotic sets: candidates are cluster
/// representatives of accepted sample images that persist across shells.
/// Witnesses are sound; an empty candidate list is evidence of emptiness up
/// to the largest shell radius at the configured thresholds, not a proof.
struct AsymptoticCloud {
    std::vector<CloudCandidate> candidates;
    std::vector<int> accepted_per_shell;
    std::vector<std::string> notes;

    bool empty() const { return candidates.empty(); }
};

enum class VerdictStatus { HoldsEvidence, FailsWithWitness };

/// Evidence outcome of a probe; a failing verdict always carries a witness.
struct Verdict {
    VerdictStatus status = VerdictStatus::HoldsEvidence;
    std::vector<SampleRecord> witness;
    /// Per-shell scalar trend: (radius, statistic) pairs.
    std::vector<std::pair<double, double>> shell_summary;
    std::string detail;

    bool holds() const { return status == VerdictStatus::HoldsEvidence; }
};

struct ProbeParams {
    RabierMode mode = RabierMode::Full;
    /// Acceptance threshold for the Palais-Smale statistics.
    double tau_abs = 1e-3;
    /// Per-shell decay exponent for the PS threshold: tau_k = tau_abs / R_k^e.
    double ps_exponent = 0.0;
    /// Tangency membership threshold on the Gamma residual.
    double gamma_tol = 1e-6;
    /// Criticality threshold for the zero-level cloud.
    double crit_tol = 1e-6;
    /// Cluster radius in objective space.
    double cluster_radius = 1e-2;
    /// Bounded-section failure threshold on running coordinate minima.
    double divergence_threshold = 1e6;
    /// Properness image-norm cap factor: cap = factor * (1 + |ybar|).
    double bound_cap_factor = 10.0;
    /// Number of best samples per shell refined by local descent.
    int descents_per_shell = 8;
    /// Shells a cluster must span (and it must reach the top two shells)
    /// to count as a candidate.
    int min_persist_shells = 3;
    double feas_tol = 1e-9;
    double solver_tol = 1e-9;
    int threads = 1;
};

/// Up to samples_per_shell feasible sublevel points per shell, deterministic
/// in the seed. Uniform directions scaled into the shell, projected and
/// rejection-filtered against the feasible set; when rejection finds
/// nothing, shell-restricted descent on the sublevel violation recovers
/// points. Empty shells are returned empty, not errors.
std::vector<std::vector<Eigen::VectorXd>> shell_sampler(const Problem& problem,
                                                        const SublevelBound& ybar,
                                                        const RadiusSchedule& schedule,
                                                        std::uint64_t seed,
                                                        const ProbeParams& params = {});

/// Bounded-section evidence: watches running componentwise minima of f over
/// sublevel samples; fails with the diverging witness chain if a coordinate
/// minimum crosses -divergence_threshold.
Verdict bounded_section_probe(const Problem& problem, const SublevelBound& ybar,
                              const RadiusSchedule& schedule, std::uint64_t seed,
                              const ProbeParams& params = {});

/// Properness evidence at the sublevel: fails if sublevel samples persist to
/// the top shells with image norms below the cap, holds if shells empty out
/// or image norms grow beyond it.
Verdict properness_probe(const Problem& problem, const SublevelBound& ybar,
                         const RadiusSchedule& schedule, std::uint64_t seed,
                         const ProbeParams& params = {});

/// Palais-Smale probe: accepted statistic nu(x).
AsymptoticCloud ps_probe(const Problem& problem, const SublevelBound& ybar,
                         const RadiusSchedule& schedule, std::uint64_t seed,
                         const ProbeParams& params = {});

/// Weak Palais-Smale probe: accepted statistic ||x|| * nu(x).
AsymptoticCloud weak_ps_probe(const Problem& problem, const SublevelBound& ybar,
                              const RadiusSchedule& schedule, std::uint64_t seed,
                              const ProbeParams& params = {});

/// Tangency probe: accepted statistic is the Gamma residual.
AsymptoticCloud mtame_probe(const Problem& problem, const SublevelBound& ybar,
                            const RadiusSchedule& schedule, std::uint64_t seed,
                            const ProbeParams& params = {});

/// Zero-level cloud: images of sublevel-feasible points with nu below
/// crit_tol, found by multi-start nu minimization from a seed grid in the
/// search box. Candidates here carry no shell-persistence requirement.
AsymptoticCloud k_zero_cloud(const Problem& problem, const SublevelBound& ybar,
                             const Eigen::VectorXd& box_lower, const Eigen::VectorXd& box_upper,
                             int seeds_per_dim, const ProbeParams& params = {});

/// Four-way consistency report for the equivalence between properness, the
/// two Palais-Smale conditions and tameness at a bounded section.
struct CrosscheckReport {
    Verdict section;
    Verdict proper;
    AsymptoticCloud ps;
    AsymptoticCloud weak_ps;
    AsymptoticCloud mtame;
    bool proper_holds = false;
    bool ps_empty = false;
    bool weak_ps_empty = false;
    bool mtame_empty = false;
    bool agree = false;
};

/// Runs the four probes and flags any disagreement; throws
/// PreconditionError when the bounded-section hypothesis fails.
CrosscheckReport equivalence_crosscheck(const Problem& problem, const SublevelBound& ybar,
                                      const RadiusSchedule& schedule, std::uint64_t seed,
                                      const ProbeParams& params = {});

} // namespace vodiag

#endif
