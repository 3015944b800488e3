#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/test_trees.hpp"
#include "vodiag/errors.hpp"
#include "vodiag/problem.hpp"

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

} // namespace

TEST_CASE("evaluate matches direct substitution") {
    const Expression x = Expression::variable(0);
    const Problem sine(1, 1, {Expression::sin(x)}, FeasibleSet::full_space());
    CHECK(sine.evaluate(pt1(0.0))[0] == doctest::Approx(0.0));

    const Problem pair = halfline_problem();
    const Eigen::VectorXd f = pair.evaluate(pt1(2.0));
    CHECK(f[0] == doctest::Approx(-4.0));
    CHECK(f[1] == doctest::Approx(2.0));

    const Problem sum(2, 1, {Expression::variable(0) + Expression::variable(1)},
                      FeasibleSet::full_space());
    CHECK(sum.evaluate(pt2(3.0, -5.0))[0] == doctest::Approx(-2.0));
}

TEST_CASE("evaluate rejects dimension mismatches") {
    const Problem sum(2, 1, {Expression::variable(0) + Expression::variable(1)},
                      FeasibleSet::full_space());
    CHECK_THROWS_AS(sum.evaluate(pt1(1.0)), InputError);
}

TEST_CASE("evaluate agrees with an extended-precision reference") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        vodiag_tests::TreeGenOptions opts;
        opts.max_depth = 8;
        opts.allow_nonsmooth = true;
        vodiag_tests::TreeGen gen(1000 + trial, 3, opts);
        const Expression e = gen.gen();
        Eigen::VectorXd x(3);
        for (int i = 0; i < 3; ++i) x[i] = unif(rng);
        const double got = e.eval(x);
        const long double want = vodiag_tests::eval_reference(e, x);
        const double scale = std::max(1.0, static_cast<double>(std::abs(want)));
        CHECK(std::abs(got - static_cast<double>(want)) <= 1e-12 * scale);
    }
}

TEST_CASE("feasibility of the supported set classes") {
    CHECK(is_feasible(FeasibleSet::full_space(), pt2(1e9, -1e9), 0.0));

    const FeasibleSet half = FeasibleSet::box(pt1(0), pt1(std::numeric_limits<double>::infinity()));
    CHECK_FALSE(is_feasible(half, pt1(-0.5), 0.0));
    CHECK(is_feasible(half, pt1(0.0), 0.0));

    const FeasibleSet poly =
        FeasibleSet::polyhedron({pt2(1, 1)}, {1.0});
    CHECK(is_feasible(poly, pt2(0.5, 0.5), 0.0));
    CHECK_FALSE(is_feasible(poly, pt2(1.0, 0.5), 0.0));

    const Expression g = Expression::int_pow(Expression::variable(0), 2) +
                         Expression::int_pow(Expression::variable(1), 2) +
                         Expression::constant(-1.0);
    const FeasibleSet disc = FeasibleSet::smooth_ineq({g});
    CHECK(is_feasible(disc, pt2(0.5, 0.5), 0.0));
    CHECK_FALSE(is_feasible(disc, pt2(1.0, 1.0), 0.0));
}

TEST_CASE("polyhedron feasibility is monotone in the slack") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Eigen::VectorXd> normals;
        std::vector<double> offsets;
        for (int j = 0; j < 3; ++j) {
            Eigen::VectorXd a = pt2(unif(rng), unif(rng));
            if (a.norm() < 1e-6) a = pt2(1, 0);
            normals.push_back(a);
            offsets.push_back(unif(rng));
        }
        const FeasibleSet set = FeasibleSet::polyhedron(normals, offsets);
        const Eigen::VectorXd x = pt2(unif(rng), unif(rng));
        const double t1 = std::abs(unif(rng));
        const double t2 = t1 + std::abs(unif(rng));
        if (is_feasible(set, x, t1)) CHECK(is_feasible(set, x, t2));
    }
}

TEST_CASE("sublevel membership") {
    const Problem pair = halfline_problem();
    const SublevelBound ybar(pt2(-4.0, 2.0));
    CHECK(pair.sublevel_member(ybar, pt1(2.0), 0.0));
    CHECK_FALSE(pair.sublevel_member(ybar, pt1(1.0), 0.0));

    // Unrestricted bound reduces to plain feasibility.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    const SublevelBound top = SublevelBound::unrestricted(2);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd x = pt1(unif(rng));
        CHECK(pair.sublevel_member(top, x, 0.0) == is_feasible(pair.feasible(), x, 0.0));
    }
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(Problem(1, 2, {Expression::variable(0)}, FeasibleSet::full_space()), InputError);
    CHECK_THROWS_AS(Problem(1, 1, {Expression::variable(3)}, FeasibleSet::full_space()), InputError);
    CHECK_THROWS_AS(FeasibleSet::box(pt1(1), pt1(0)), InputError);
    CHECK_THROWS_AS(FeasibleSet::polyhedron({pt1(0)}, {1.0}), InputError);
    CHECK_THROWS_AS(Expression::int_pow(Expression::variable(0), -1), InputError);
    CHECK_THROWS_AS(FeasibleSet::smooth_ineq({Expression::abs(Expression::variable(0))}), InputError);
}
