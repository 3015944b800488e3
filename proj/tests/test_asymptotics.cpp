#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vodiag/asymptotics.hpp"
#include "vodiag/errors.hpp"
#include "vodiag/min_norm.hpp"

#include <cmath>

using namespace vodiag;

namespace {

Eigen::VectorXd pt1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

Eigen::VectorXd pt2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Problem sine_problem() {
    return Problem(1, 1, {Expression::sin(Expression::variable(0))}, FeasibleSet::full_space());
}

Problem quad_problem() {
    return Problem(1, 1, {Expression::int_pow(Expression::variable(0), 2)},
                   FeasibleSet::full_space());
}

Problem halfline_problem() {
    const Expression x = Expression::variable(0);
    return Problem(1, 2, {Expression::neg(Expression::int_pow(x, 2)), x},
                   FeasibleSet::box(pt1(0), pt1(std::numeric_limits<double>::infinity())));
}

Problem sum2_problem() {
    return Problem(2, 1, {Expression::variable(0) + Expression::variable(1)},
                   FeasibleSet::full_space());
}

RadiusSchedule small_schedule(int shells = 12, int samples = 128) {
    return RadiusSchedule::geometric(1.0, 2.0, shells, samples);
}

bool has_candidate_near(const AsymptoticCloud& cloud, const Eigen::VectorXd& y, double tol) {
    for (const auto& c : cloud.candidates)
        if ((c.y - y).norm() <= tol) return true;
    return false;
}

} // namespace

TEST_CASE("shell sampler fills and empties shells as the sublevel dictates") {
    const auto schedule = small_schedule();
    ProbeParams params;

    // sin <= 0 holds on half of every period: every shell is populated.
    const auto sine_shells =
        shell_sampler(sine_problem(), SublevelBound(pt1(0.0)), schedule, 3, params);
    for (const auto& shell : sine_shells) CHECK_FALSE(shell.empty());

    // x^2 <= 1 confines samples to [-1,1], below the first radius.
    const auto quad_shells =
        shell_sampler(quad_problem(), SublevelBound(pt1(1.0)), schedule, 3, params);
    for (const auto& shell : quad_shells) CHECK(shell.empty());

    // The half-line pair at ybar = f(2) pins the sublevel set to {2}.
    const auto half_shells =
        shell_sampler(halfline_problem(), SublevelBound(pt2(-4.0, 2.0)), schedule, 3, params);
    REQUIRE_FALSE(half_shells[0].empty());
    CHECK(half_shells[0][0][0] == doctest::Approx(2.0).epsilon(1e-6));
    for (std::size_t k = 1; k < half_shells.size(); ++k) CHECK(half_shells[k].empty());
}

TEST_CASE("sampler determinism in the seed") {
    const auto schedule = small_schedule(8, 64);
    ProbeParams params;
    const auto a = shell_sampler(sine_problem(), SublevelBound(pt1(0.0)), schedule, 11, params);
    const auto b = shell_sampler(sine_problem(), SublevelBound(pt1(0.0)), schedule, 11, params);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        REQUIRE(a[k].size() == b[k].size());
        for (std::size_t i = 0; i < a[k].size(); ++i) CHECK(a[k][i] == b[k][i]);
    }
}

TEST_CASE("bounded sections of the worked examples") {
    const auto schedule = small_schedule();
    ProbeParams params;

    CHECK(bounded_section_probe(halfline_problem(), SublevelBound(pt2(-4.0, 2.0)), schedule, 5, params)
              .holds());
    CHECK(bounded_section_probe(sine_problem(), SublevelBound(pt1(0.0)), schedule, 5, params).holds());

    // x1 + x2 is unbounded below on its sublevel set; needs shells past 1e6.
    const auto big = RadiusSchedule::geometric(1.0, 2.0, 21, 128);
    const auto verdict =
        bounded_section_probe(sum2_problem(), SublevelBound(pt1(0.0)), big, 5, params);
    CHECK_FALSE(verdict.holds());
    CHECK_FALSE(verdict.witness.empty());

    CHECK_THROWS_AS(bounded_section_probe(sine_problem(), SublevelBound::unrestricted(1), schedule,
                                          5, params),
                    PreconditionError);
}

TEST_CASE("properness probes of the worked examples") {
    const auto schedule = small_schedule();
    ProbeParams params;

    CHECK_FALSE(properness_probe(sine_problem(), SublevelBound(pt1(0.0)), schedule, 5, params).holds());
    CHECK(properness_probe(quad_problem(), SublevelBound::unrestricted(1), schedule, 5, params).holds());
    CHECK_FALSE(properness_probe(sum2_problem(), SublevelBound(pt1(0.0)), schedule, 5, params).holds());
}

TEST_CASE("palais-smale clouds of the worked examples") {
    const auto schedule = small_schedule();
    ProbeParams params;

    CHECK(ps_probe(quad_problem(), SublevelBound::unrestricted(1), schedule, 5, params).empty());

    const auto sine_cloud = ps_probe(sine_problem(), SublevelBound(pt1(0.0)), schedule, 5, params);
    CHECK(has_candidate_near(sine_cloud, pt1(-1.0), 1e-3));

    // nu vanishes identically on the half-line pair but the images diverge:
    // no candidate, and the divergence is called out.
    const auto half_cloud =
        ps_probe(halfline_problem(), SublevelBound::unrestricted(2), schedule, 5, params);
    CHECK(half_cloud.empty());
    REQUIRE_FALSE(half_cloud.notes.empty());
    CHECK(half_cloud.notes.front().find("image norms diverge") != std::string::npos);
}

TEST_CASE("weak palais-smale cloud keeps the critical value and drops the boundary") {
    const auto schedule = small_schedule();
    ProbeParams params;
    const auto cloud = weak_ps_probe(sine_problem(), SublevelBound(pt1(0.0)), schedule, 5, params);
    CHECK(has_candidate_near(cloud, pt1(-1.0), 1e-3));
    for (const auto& c : cloud.candidates) CHECK(std::abs(c.y[0]) > 0.9);

    const Problem ident(1, 1, {Expression::variable(0)}, FeasibleSet::full_space());
    CHECK(weak_ps_probe(ident, SublevelBound(pt1(0.0)), schedule, 5, params).empty());
}

TEST_CASE("tangency cloud sees the boundary value sin misses") {
    const auto schedule = small_schedule(12, 512);
    ProbeParams params;
    const auto cloud = mtame_probe(sine_problem(), SublevelBound(pt1(0.0)), schedule, 5, params);
    bool near_zero = false;
    for (const auto& c : cloud.candidates) near_zero = near_zero || std::abs(c.y[0]) <= 1e-2;
    CHECK(near_zero);

    // Candidates are separated representatives.
    for (std::size_t i = 0; i < cloud.candidates.size(); ++i)
        for (std::size_t j = i + 1; j < cloud.candidates.size(); ++j)
            CHECK((cloud.candidates[i].y - cloud.candidates[j].y).norm() > params.cluster_radius);

    const Problem ident(1, 1, {Expression::variable(0)}, FeasibleSet::full_space());
    CHECK(mtame_probe(ident, SublevelBound(pt1(0.0)), schedule, 5, params).empty());
    CHECK(mtame_probe(quad_problem(), SublevelBound::unrestricted(1), schedule, 5, params).empty());
}

TEST_CASE("ps acceptance implies weak-ps acceptance on the bundled suite") {
    const auto schedule = small_schedule();
    ProbeParams params;
    const auto ps = ps_probe(sine_problem(), SublevelBound(pt1(0.0)), schedule, 5, params);
    const auto weak = weak_ps_probe(sine_problem(), SublevelBound(pt1(0.0)), schedule, 5, params);
    for (const auto& cand : ps.candidates) {
        bool matched = false;
        for (const auto& w : weak.candidates) matched = matched || (cand.y - w.y).norm() <= 1e-2;
        CHECK(matched);
    }
}

TEST_CASE("critical-value clouds in a box") {
    ProbeParams params;

    const auto half = k_zero_cloud(halfline_problem(), SublevelBound(pt2(-4.0, 2.0)), pt1(0.0),
                                   pt1(10.0), 41, params);
    REQUIRE(half.candidates.size() == 1);
    CHECK(half.candidates[0].y[0] == doctest::Approx(-4.0).epsilon(1e-5));
    CHECK(half.candidates[0].y[1] == doctest::Approx(2.0).epsilon(1e-5));

    const auto quad = k_zero_cloud(quad_problem(), SublevelBound::unrestricted(1), pt1(-5.0),
                                   pt1(5.0), 41, params);
    REQUIRE(quad.candidates.size() == 1);
    CHECK(std::abs(quad.candidates[0].y[0]) <= 1e-8);

    const Problem ident(1, 1, {Expression::variable(0)}, FeasibleSet::full_space());
    CHECK(k_zero_cloud(ident, SublevelBound(pt1(0.0)), pt1(-5.0), pt1(0.0), 41, params).empty());
}

TEST_CASE("witnesses replay to their recorded values") {
    const auto schedule = small_schedule();
    ProbeParams params;
    const Problem sine = sine_problem();
    const auto cloud = ps_probe(sine, SublevelBound(pt1(0.0)), schedule, 5, params);
    REQUIRE_FALSE(cloud.candidates.empty());
    RabierParams rp;
    int rows = 0;
    for (const auto& cand : cloud.candidates) {
        for (const auto& rec : cand.witness) {
            CHECK(std::abs(rec.f[0] - sine.evaluate(rec.x)[0]) <= 1e-10);
            CHECK(std::abs(rec.nu - rabier_nu(sine, rec.x, rp)) <= 1e-10);
            ++rows;
        }
    }
    CHECK(rows > 0);
}

TEST_CASE("crosscheck agreement on the bundled suite") {
    ProbeParams params;
    const auto big = RadiusSchedule::geometric(1.0, 2.0, 20, 256);

    const auto quad = equivalence_crosscheck(quad_problem(), SublevelBound(pt1(1.0)), big, 5, params);
    CHECK(quad.agree);
    CHECK(quad.proper_holds);

    const auto half =
        equivalence_crosscheck(halfline_problem(), SublevelBound(pt2(-4.0, 2.0)), big, 5, params);
    CHECK(half.agree);
    CHECK(half.proper_holds);

    const auto sine = equivalence_crosscheck(sine_problem(), SublevelBound(pt1(0.0)), big, 5, params);
    CHECK(sine.agree);
    CHECK_FALSE(sine.proper_holds);

    // Hypothesis failure surfaces as a precondition error.
    const auto sched21 = RadiusSchedule::geometric(1.0, 2.0, 21, 128);
    CHECK_THROWS_AS(equivalence_crosscheck(sum2_problem(), SublevelBound(pt1(0.0)), sched21, 5, params),
                    PreconditionError);
}
