#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/test_trees.hpp"
#include "vodiag/calculus.hpp"
#include "vodiag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace vodiag;

namespace {

Eigen::VectorXd pt1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

bool vertex_sets_equal(const Polytope& a, const Polytope& b, double tol) {
    if (a.size() != b.size()) return false;
    for (const auto& v : a.vertices())
        if (!b.has_vertex(v, tol)) return false;
    return true;
}

} // namespace

TEST_CASE("smooth gradients come back as singletons") {
    const Expression sq = Expression::int_pow(Expression::variable(0), 2);
    const Polytope p = subdiff(sq, pt1(3.0));
    REQUIRE(p.size() == 1);
    CHECK(p.vertices()[0][0] == doctest::Approx(6.0));

    const Polytope ps = subdiff(Expression::sin(Expression::variable(0)), pt1(M_PI));
    REQUIRE(ps.size() == 1);
    CHECK(ps.vertices()[0][0] == doctest::Approx(-1.0));
}

TEST_CASE("abs at the kink returns exactly both branch gradients") {
    const Polytope p = subdiff(Expression::abs(Expression::variable(0)), pt1(0.0));
    REQUIRE(p.size() == 2);
    CHECK(p.has_vertex(pt1(1.0), 1e-15));
    CHECK(p.has_vertex(pt1(-1.0), 1e-15));
}

TEST_CASE("negated branch polytopes") {
    const Expression sq = Expression::int_pow(Expression::variable(0), 2);
    CHECK(neg_subdiff(sq, pt1(3.0)).vertices()[0][0] == doctest::Approx(-6.0));
    CHECK(neg_subdiff(Expression::neg(sq), pt1(1.0)).vertices()[0][0] == doctest::Approx(2.0));
    const Polytope pa = neg_subdiff(Expression::abs(Expression::variable(0)), pt1(0.0));
    CHECK(pa.has_vertex(pt1(1.0), 1e-15));
    CHECK(pa.has_vertex(pt1(-1.0), 1e-15));
}

TEST_CASE("subdiff of a negation is the vertexwise negation") {
    for (int trial = 0; trial < 100; ++trial) {
        vodiag_tests::TreeGenOptions opts;
        opts.allow_nonsmooth = true;
        vodiag_tests::TreeGen gen(500 + trial, 2, opts);
        const Expression e = gen.gen();
        std::mt19937_64 rng(trial);
        std::uniform_real_distribution<double> unif(-2.0, 2.0);
        Eigen::VectorXd x(2);
        x << unif(rng), unif(rng);
        const Polytope direct = subdiff(Expression::neg(e), x);
        const Polytope negated = subdiff(e, x).negated();
        CHECK(vertex_sets_equal(direct, negated, 1e-12));
    }
}

TEST_CASE("smooth trees agree with central differences") {
    int done = 0;
    for (int trial = 0; done < 200; ++trial) {
        REQUIRE(trial < 2000);
        vodiag_tests::TreeGen gen(9000 + trial, 2);
        const Expression e = gen.gen();
        std::mt19937_64 rng(trial);
        std::uniform_real_distribution<double> unif(-1.5, 1.5);
        Eigen::VectorXd x(2);
        x << unif(rng), unif(rng);
        // Skip wildly scaled draws; the finite-difference comparison needs a
        // sane third derivative.
        if (std::abs(e.eval(x)) > 50) continue;
        const Polytope p = subdiff(e, x);
        REQUIRE(p.size() == 1);
        bool ok = true;
        const double h = 1e-5;
        for (int i = 0; i < 2 && ok; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (e.eval(xp) - e.eval(xm)) / (2 * h);
            if (std::abs(fd) > 1e3) {
                ok = false;  // steep draw, retry with another tree
                continue;
            }
            CHECK(std::abs(p.vertices()[0][i] - fd) <= 1e-6);
        }
        if (ok) ++done;
    }
}

TEST_CASE("larger tie tolerance only enlarges max vertex sets") {
    for (int trial = 0; trial < 60; ++trial) {
        vodiag_tests::TreeGenOptions opts;
        opts.allow_nonsmooth = true;
        vodiag_tests::TreeGen gen(1700 + trial, 2, opts);
        const Expression e = gen.gen();
        std::mt19937_64 rng(trial * 13 + 1);
        std::uniform_real_distribution<double> unif(-2.0, 2.0);
        Eigen::VectorXd x(2);
        x << unif(rng), unif(rng);
        CalculusParams tight, loose;
        tight.tie_tol = 1e-9;
        loose.tie_tol = 1e-2;
        const Polytope small = subdiff(e, x, tight);
        const Polytope big = subdiff(e, x, loose);
        for (const auto& v : small.vertices()) CHECK(big.has_vertex(v, 1e-10));
    }
}

TEST_CASE("normal cone of the half-line") {
    const FeasibleSet half = FeasibleSet::box(pt1(0), pt1(std::numeric_limits<double>::infinity()));
    const Cone at_origin = normal_cone(half, pt1(0.0));
    REQUIRE(at_origin.rays().size() == 1);
    CHECK(at_origin.rays()[0][0] == doctest::Approx(-1.0));
    CHECK(normal_cone(half, pt1(1.0)).is_trivial());
    CHECK(normal_cone(FeasibleSet::full_space(), pt1(5.0)).is_trivial());
    CHECK_THROWS_AS(normal_cone(half, pt1(-1.0)), PreconditionError);
}

TEST_CASE("normal cone of a convex polyhedron") {
    // Unit square as four half-spaces.
    Eigen::VectorXd e1(2), e2(2);
    e1 << 1, 0;
    e2 << 0, 1;
    const FeasibleSet square =
        FeasibleSet::polyhedron({e1, e2, -e1, -e2}, {1.0, 1.0, 0.0, 0.0});

    Eigen::VectorXd corner(2);
    corner << 1, 1;
    const Cone at_corner = normal_cone(square, corner);
    REQUIRE(at_corner.rays().size() == 2);
    bool has_e1 = false, has_e2 = false;
    for (const auto& r : at_corner.rays()) {
        if ((r - e1).norm() < 1e-12) has_e1 = true;
        if ((r - e2).norm() < 1e-12) has_e2 = true;
    }
    CHECK(has_e1);
    CHECK(has_e2);

    Eigen::VectorXd inside(2);
    inside << 0.5, 0.5;
    CHECK(normal_cone(square, inside).is_trivial());
}

TEST_CASE("smooth constraint cones require a qualification") {
    // g(x) = x1^2 + x2^2 - 1 on the unit circle.
    const Expression g = Expression::int_pow(Expression::variable(0), 2) +
                         Expression::int_pow(Expression::variable(1), 2) +
                         Expression::constant(-1.0);
    const FeasibleSet disc = FeasibleSet::smooth_ineq({g});
    Eigen::VectorXd boundary(2);
    boundary << 1, 0;
    const Cone c = normal_cone(disc, boundary);
    REQUIRE(c.rays().size() == 1);
    CHECK(c.rays()[0][0] == doctest::Approx(2.0));
    CHECK(c.rays()[0][1] == doctest::Approx(0.0));

    // g(x) = x1^2 has a vanishing gradient where it is active.
    const Expression degenerate = Expression::int_pow(Expression::variable(0), 2);
    const FeasibleSet bad = FeasibleSet::smooth_ineq({degenerate});
    Eigen::VectorXd origin(1);
    origin << 0;
    CHECK_THROWS_AS(normal_cone(bad, origin), DegenerateConstraintError);
}
