#include "vodiag/descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vodiag {

Eigen::VectorXd DescentRegion::project(Eigen::VectorXd x) const {
    if (box_lower.size() == x.size()) {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x[i] = std::min(std::max(x[i], box_lower[i]), box_upper[i]);
    }
    if (feasible) x = feasible->project(x);
    if (shell_hi > 0.0) {
        const double r = x.norm();
        // Radial rescaling; exact for scale-invariant sets (cones, boxes
        // anchored at the origin), best effort otherwise.
        if (r < 1e-300) {
            x.setZero();
            if (x.size() > 0) x[0] = shell_lo;
        } else if (r < shell_lo) {
            x *= shell_lo / r;
        } else if (r > shell_hi) {
            x *= shell_hi / r;
        }
    }
    return x;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded_eval(const std::function<double(const Eigen::VectorXd&)>& objective,
                    const std::function<bool(const Eigen::VectorXd&)>& accept,
                    const Eigen::VectorXd& x) {
    if (accept && !accept(x)) return kInf;
    const double v = objective(x);
    return std::isfinite(v) ? v : kInf;
}

} // namespace

DescentResult descend(const std::function<double(const Eigen::VectorXd&)>& objective,
                      Eigen::VectorXd start, const DescentRegion& region,
                      const DescentOptions& opts,
                      const std::function<bool(const Eigen::VectorXd&)>& accept) {
    DescentResult res;
    Eigen::VectorXd x = region.project(std::move(start));
    double fx = guarded_eval(objective, accept, x);
    const Eigen::Index n = x.size();
    double step = opts.initial_step;

    for (int it = 0; it < opts.max_steps && fx < kInf; ++it) {
        ++res.steps;
        Eigen::VectorXd grad(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += opts.fd_step;
            xm[i] -= opts.fd_step;
            grad[i] = (objective(xp) - objective(xm)) / (2.0 * opts.fd_step);
        }
        const double gn = grad.norm();
        if (gn < 1e-14) break;

        bool moved = false;
        double trial_step = step;
        for (int bt = 0; bt < 24; ++bt) {
            Eigen::VectorXd cand = region.project(x - (trial_step / gn) * grad);
            const double fc = guarded_eval(objective, accept, cand);
            if (fc < fx - 1e-12 * std::abs(fx)) {
                x = std::move(cand);
                fx = fc;
                moved = true;
                step = trial_step * 2.0;
                break;
            }
            trial_step *= 0.5;
            if (trial_step < opts.step_floor) break;
        }
        if (!moved) break;
    }

    // Coordinate polish: golden-section per axis; resolves kinks where the
    // finite-difference gradient is unreliable.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double bracket = opts.polish_bracket;
    for (int round = 0; round < opts.polish_rounds; ++round) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double lo = -bracket, hi = bracket;
            const auto probe = [&](double t) {
                Eigen::VectorXd cand = x;
                cand[i] += t;
                cand = region.project(cand);
                return guarded_eval(objective, accept, cand);
            };
            double a = lo, b = hi;
            double c = b - gr * (b - a), d = a + gr * (b - a);
            double fc = probe(c), fd = probe(d);
            for (int k = 0; k < opts.polish_iters; ++k) {
                if (fc <= fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - gr * (b - a);
                    fc = probe(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + gr * (b - a);
                    fd = probe(d);
                }
            }
            const double t = 0.5 * (a + b);
            Eigen::VectorXd cand = x;
            cand[i] += t;
            cand = region.project(cand);
            const double fcand = guarded_eval(objective, accept, cand);
            if (fcand < fx) {
                x = std::move(cand);
                fx = fcand;
            }
        }
        bracket *= 0.25;
    }

    res.x = std::move(x);
    res.value = fx;
    return res;
}

} // namespace vodiag
