#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vodiag/efficiency.hpp"
#include "vodiag/errors.hpp"
#include "vodiag/oracle.hpp"

#include <cmath>
#include <random>

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

Problem halfline_problem() {
    const Expression x = Expression::variable(0);
    return Problem(1, 2, {Expression::neg(Expression::int_pow(x, 2)), x},
                   FeasibleSet::box(pt1(0), pt1(std::numeric_limits<double>::infinity())));
}

Problem parabola_pair() {
    const Expression x = Expression::variable(0);
    return Problem(1, 2, {x, Expression::int_pow(x, 2)}, FeasibleSet::full_space());
}

std::vector<Eigen::VectorXd> grid1(const Problem& problem, double lo, double hi, double step) {
    return feasible_grid_points(problem, GridSpec::from_step(pt1(lo), pt1(hi), step), 1e-9);
}

} // namespace

TEST_CASE("dominance basics") {
    CHECK(dominates(pt2(1, 2), pt2(1, 3)));
    CHECK_FALSE(dominates(pt2(1, 2), pt2(1, 2)));
    CHECK_FALSE(dominates(pt2(0, 5), pt2(1, 3)));
    CHECK_THROWS_AS(dominates(pt1(0), pt2(0, 0)), InputError);
}

TEST_CASE("dominance is a strict partial order") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> small(-2, 2);
    for (int trial = 0; trial < 10000; ++trial) {
        Eigen::VectorXd a(3), b(3), c(3);
        for (int i = 0; i < 3; ++i) {
            a[i] = small(rng);
            b[i] = small(rng);
            c[i] = small(rng);
        }
        CHECK_FALSE(dominates(a, a));
        if (dominates(a, b)) CHECK_FALSE(dominates(b, a));
        if (dominates(a, b) && dominates(b, c)) CHECK(dominates(a, c));
    }
}

TEST_CASE("pareto verification on the worked examples") {
    const Problem half = halfline_problem();
    const auto half_grid = grid1(half, 0.0, 10.0, 1e-3);
    CHECK(pareto_verify(half, pt1(1.0), half_grid, 1e-9).holds());

    const Problem pair = parabola_pair();
    const auto pair_grid = grid1(pair, -5.0, 5.0, 1e-3);
    CHECK(pareto_verify(pair, pt1(-0.5), pair_grid, 1e-9).holds());

    const auto fail = pareto_verify(pair, pt1(1.0), pair_grid, 1e-9);
    CHECK_FALSE(fail.holds());
    REQUIRE_FALSE(fail.witness.empty());
    // (0,0) <= (1,1): the witness must itself dominate.
    CHECK(dominates(fail.witness[0].f, pair.evaluate(pt1(1.0))));
}

TEST_CASE("trade-off violation on the half-line") {
    const Problem half = halfline_problem();
    // A single far-out sample: ratio (xbar^2 - x^2)/(x - xbar)... = x + xbar.
    const std::vector<Eigen::VectorXd> samples{pt1(1.0), pt1(20.0)};
    const auto report = geoffrion_check(half, pt1(1.0), 10.0, samples, 1e-9);
    CHECK_FALSE(report.consistent);
    CHECK(report.min_ratio == doctest::Approx(21.0).epsilon(1e-12));
    CHECK(report.index == 0);
}

TEST_CASE("trade-off consistency for the parabola pair") {
    const Problem pair = parabola_pair();
    const auto grid = grid1(pair, -5.0, 5.0, 1e-3);
    // Closed-form branch ratios at xbar = -1/2 are 1/(1/2 - x) below and
    // 1/2 - x inside (-1/2, 1/2); both stay below 1 on the grid.
    const auto report = geoffrion_check(pair, pt1(-0.5), 1.01, grid, 1e-9);
    CHECK(report.consistent);
}

TEST_CASE("trade-off consistency is monotone in the level") {
    const Problem pair = parabola_pair();
    const auto grid = grid1(pair, -5.0, 5.0, 1e-2);
    bool seen_consistent = false;
    for (const double level : {0.2, 0.5, 1.01, 2.0, 8.0}) {
        const auto report = geoffrion_check(pair, pt1(-0.5), level, grid, 1e-9);
        if (seen_consistent) CHECK(report.consistent);
        seen_consistent = seen_consistent || report.consistent;
    }
    CHECK(seen_consistent);
}

TEST_CASE("dominated points are rejected before the trade-off scan") {
    const Problem pair = parabola_pair();
    const auto grid = grid1(pair, -5.0, 5.0, 1e-2);
    CHECK_THROWS_AS(geoffrion_check(pair, pt1(1.0), 10.0, grid, 1e-9), PreconditionError);
}

TEST_CASE("scalarization finds the weighted optima") {
    const Problem pair = parabola_pair();

    ScalarizationConfig c1(pt2(1, 1), SublevelBound(pt2(0, 1)), pt1(-5), pt1(5));
    const auto r1 = scalarize_solve(pair, c1);
    CHECK(r1.x[0] == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(r1.pareto.holds());

    ScalarizationConfig c2(pt2(2, 1), SublevelBound(pt2(0, 1)), pt1(-5), pt1(5));
    const auto r2 = scalarize_solve(pair, c2);
    CHECK(r2.x[0] == doctest::Approx(-1.0).epsilon(1e-6));

    // Singleton sublevel set on the half-line.
    ScalarizationConfig c3(pt2(1, 1), SublevelBound(pt2(-4, 2)), pt1(0), pt1(10));
    const auto r3 = scalarize_solve(halfline_problem(), c3);
    CHECK(r3.x[0] == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("scalarization reports an empty restricted sublevel set") {
    // x^2 <= -1 is impossible.
    const Problem quad(1, 1, {Expression::int_pow(Expression::variable(0), 2)},
                       FeasibleSet::full_space());
    ScalarizationConfig c(pt1(1.0), SublevelBound(pt1(-1.0)), pt1(-3), pt1(3));
    c.starts = 8;
    CHECK_THROWS_AS(scalarize_solve(quad, c), PreconditionError);
}

TEST_CASE("front sweep dedups and verifies") {
    const Problem pair = parabola_pair();
    ScalarizationConfig config(pt2(1, 1), SublevelBound::unrestricted(2), pt1(-5), pt1(5));
    config.starts = 24;
    const std::vector<Eigen::VectorXd> grid{pt2(1, 1), pt2(2, 1), pt2(1, 2)};
    const auto front = pareto_front(pair, grid, config);
    CHECK(front.failures.empty());
    REQUIRE(front.entries.size() == 3);
    CHECK(front.entries[0].x[0] == doctest::Approx(-0.5).epsilon(1e-5));
    CHECK(front.entries[1].x[0] == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(front.entries[2].x[0] == doctest::Approx(-0.25).epsilon(1e-5));
}

TEST_CASE("single objective reduces to constrained scalar minimization") {
    const Problem quad(1, 1, {Expression::int_pow(Expression::variable(0), 2)},
                       FeasibleSet::full_space());
    ScalarizationConfig c(pt1(1.0), SublevelBound::unrestricted(1), pt1(-2), pt1(2));
    const auto res = scalarize_solve(quad, c);
    CHECK(std::abs(res.x[0]) <= 1e-6);
    CHECK(res.pareto.holds());

    // Only the grid-global minimum passes the verification.
    const auto grid = grid1(quad, -2.0, 2.0, 1e-2);
    CHECK(pareto_verify(quad, pt1(0.0), grid, 1e-9).holds());
    CHECK_FALSE(pareto_verify(quad, pt1(0.5), grid, 1e-9).holds());
}

TEST_CASE("scalarization minimizers are rabier-critical") {
    // Interior smooth optimum with normalized weights: the stationarity
    // residual bounds the rabier value.
    const Problem pair = parabola_pair();
    ScalarizationConfig c(pt2(0.5, 0.5), SublevelBound::unrestricted(2), pt1(-5), pt1(5));
    const auto res = scalarize_solve(pair, c);
    RabierParams rp;
    CHECK(rabier_nu(pair, res.x, rp) <= 10 * c.tol);
}

TEST_CASE("recession directions of the worked examples") {
    const auto schedule = RadiusSchedule::geometric(1.0, 2.0, 20, 256);
    RecessionParams params;

    const auto pair_report = recession_probe(parabola_pair(), schedule, 9, params);
    CHECK(pair_report.eq8_holds);
    REQUIRE_FALSE(pair_report.directions.empty());
    bool up = false;
    for (const auto& d : pair_report.directions) up = up || (d - pt2(0, 1)).norm() <= 1e-3;
    CHECK(up);

    const auto half_report = recession_probe(halfline_problem(), schedule, 9, params);
    CHECK_FALSE(half_report.eq8_holds);
    REQUIRE(half_report.witness.has_value());
    CHECK((*half_report.witness - pt2(-1, 0)).norm() <= 1e-6);

    const Problem quad(1, 1, {Expression::int_pow(Expression::variable(0), 2)},
                       FeasibleSet::full_space());
    const auto quad_report = recession_probe(quad, schedule, 9, params);
    CHECK(quad_report.eq8_holds);
    REQUIRE_FALSE(quad_report.directions.empty());
    CHECK(quad_report.directions[0][0] == doctest::Approx(1.0));
}

TEST_CASE("recession directions survive radius rescaling") {
    RecessionParams params;
    const auto a = recession_probe(parabola_pair(), RadiusSchedule::geometric(1.0, 2.0, 18, 256), 9,
                                   params);
    const auto b = recession_probe(parabola_pair(), RadiusSchedule::geometric(3.0, 2.0, 18, 256), 9,
                                   params);
    REQUIRE_FALSE(a.directions.empty());
    REQUIRE_FALSE(b.directions.empty());
    for (const auto& da : a.directions) {
        double best = 1e9;
        for (const auto& db : b.directions) best = std::min(best, (da - db).norm());
        CHECK(best <= 1e-3);
    }
}

TEST_CASE("existence evidence composes the probes") {
    const auto schedule = RadiusSchedule::geometric(1.0, 2.0, 18, 192);

    const auto pair_report =
        geoffrion_existence_report(parabola_pair(), schedule, RabierMode::Full, 13);
    CHECK(pair_report.sufficient_evidence);
    CHECK_FALSE(pair_report.necessary_refuted);
    REQUIRE(pair_report.exhibited.has_value());
    CHECK(pair_report.exhibited->pareto.holds());
    CHECK(pair_report.exhibited_consistent);

    const auto half_report =
        geoffrion_existence_report(halfline_problem(), schedule, RabierMode::Full, 13);
    CHECK(half_report.necessary_refuted);
    CHECK_FALSE(half_report.sufficient_evidence);

    const Problem quad(1, 1, {Expression::int_pow(Expression::variable(0), 2)},
                       FeasibleSet::full_space());
    const auto quad_report = geoffrion_existence_report(quad, schedule, RabierMode::Full, 13);
    CHECK(quad_report.sufficient_evidence);
    CHECK(quad_report.exhibited_consistent);
}
