#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vodiag/efficiency.hpp"
#include "vodiag/errors.hpp"
#include "vodiag/oracle.hpp"

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

Problem halfline_problem() {
    const Expression x = Expression::variable(0);
    return Problem(1, 2, {Expression::neg(Expression::int_pow(x, 2)), x},
                   FeasibleSet::box(pt1(0), pt1(std::numeric_limits<double>::infinity())));
}

Problem parabola_pair() {
    const Expression x = Expression::variable(0);
    return Problem(1, 2, {x, Expression::int_pow(x, 2)}, FeasibleSet::full_space());
}

} // namespace

TEST_CASE("half-line pair: every feasible grid point is nondominated") {
    GridSpec spec;
    spec.lower = pt1(0);
    spec.upper = pt1(10);
    spec.steps = {10001};
    const auto front = grid_pareto(halfline_problem(), spec);
    CHECK(front.size() == 10001);
}

TEST_CASE("parabola pair: nondominated set is the nonpositive axis") {
    GridSpec spec;
    spec.lower = pt1(-5);
    spec.upper = pt1(5);
    spec.steps = {10001};
    const auto front = grid_pareto(parabola_pair(), spec);
    for (const auto& x : front) CHECK(x[0] <= 1e-12);
    // every grid point in [-5, 0] shows up
    CHECK(front.size() == 5001);
}

TEST_CASE("single objective: grid argmin only") {
    const Problem quad(1, 1, {Expression::int_pow(Expression::variable(0), 2)},
                       FeasibleSet::full_space());
    GridSpec spec;
    spec.lower = pt1(-1);
    spec.upper = pt1(1);
    spec.steps = {201};
    const auto front = grid_pareto(quad, spec);
    REQUIRE(front.size() == 1);
    CHECK(std::abs(front[0][0]) <= 1e-12);
}

TEST_CASE("grid pareto output is mutually nondominated") {
    const auto front = grid_pareto(parabola_pair(),
                                   GridSpec::from_step(pt1(-3), pt1(3), 0.01));
    const Problem pair = parabola_pair();
    for (std::size_t i = 0; i < front.size(); ++i)
        for (std::size_t j = 0; j < front.size(); ++j)
            if (i != j) CHECK_FALSE(dominates(pair.evaluate(front[i]), pair.evaluate(front[j])));
}

TEST_CASE("grid refinement never adds dominated points") {
    const Problem pair = parabola_pair();
    const auto coarse = grid_pareto(pair, GridSpec::from_step(pt1(-3), pt1(3), 0.1));
    const auto fine = grid_pareto(pair, GridSpec::from_step(pt1(-3), pt1(3), 0.05));
    for (const auto& xf : fine)
        for (const auto& xc : coarse)
            CHECK_FALSE(dominates(pair.evaluate(xc), pair.evaluate(xf)));
}

TEST_CASE("size guards fire") {
    GridSpec spec;
    spec.lower = pt2(0, 0);
    spec.upper = pt2(1, 1);
    spec.steps = {10000, 10000};
    CHECK_THROWS_AS(spec.validate(), InputError);

    const Polytope big({pt1(0), pt1(1), pt1(2), pt1(3), pt1(4), pt1(5), pt1(6), pt1(7), pt1(8)});
    CHECK_THROWS_AS(brute_min_norm(big, Cone{}, 0.02, 1.0), InputError);
    CHECK_THROWS_AS(brute_min_norm(Polytope({pt1(1)}), Cone{}, 0.5, 1.0), InputError);
}

TEST_CASE("brute force examples") {
    CHECK(brute_min_norm(Polytope({pt2(1, 0), pt2(0, 1)}), Cone{}, 0.02, 1.0) ==
          doctest::Approx(std::sqrt(2.0) / 2).epsilon(0.03));
    // 0 needs the weight 2/3, which is off the 0.02 grid; the nearest grid
    // mix lands at step * max|v| / 2.
    CHECK(brute_min_norm(Polytope({pt1(-2), pt1(1)}), Cone{}, 0.02, 1.0) <= 0.02 * 2 + 1e-12);
    CHECK(brute_min_norm(Polytope({pt2(1, 1)}), Cone({pt2(-1, 0)}), 0.02, 4.0) ==
          doctest::Approx(1.0).epsilon(0.01));
}
