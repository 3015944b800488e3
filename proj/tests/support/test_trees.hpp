#ifndef VODIAG_TESTS_SUPPORT_TEST_TREES_HPP
#define VODIAG_TESTS_SUPPORT_TEST_TREES_HPP

// Shared test-only helpers: random expression generation and two reference
// evaluators kept independent of the library's evaluation and calculus
// paths (extended precision recursion and forward-mode dual numbers).

#include "vodiag/expression.hpp"

#include <Eigen/Core>
#include <cmath>
#include <random>

namespace vodiag_tests {

using vodiag::Expression;
using vodiag::NodeKind;

struct TreeGenOptions {
    int max_depth = 5;
    bool allow_nonsmooth = false;
    int exp_budget = 1;
    double constant_range = 2.0;
    int max_pow = 3;
};

class TreeGen {
public:
    TreeGen(std::uint64_t seed, int n_vars, TreeGenOptions opts = {})
        : rng_(seed), n_(n_vars), opts_(opts) {}

    Expression gen() { return gen_node(0, opts_.exp_budget); }

private:
    std::mt19937_64 rng_;
    int n_;
    TreeGenOptions opts_;

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    int pick(int count) { return std::uniform_int_distribution<int>(0, count - 1)(rng_); }

    Expression leaf() {
        if (pick(3) == 0) return Expression::constant(uniform(-opts_.constant_range, opts_.constant_range));
        return Expression::variable(pick(n_));
    }

    Expression gen_node(int depth, int exp_budget) {
        if (depth >= opts_.max_depth) return leaf();
        const int kinds = opts_.allow_nonsmooth ? 10 : 7;
        switch (pick(kinds)) {
            case 0:
            case 1:
                return leaf();
            case 2: {
                std::vector<Expression> kids;
                const int k = 2 + pick(2);
                for (int i = 0; i < k; ++i) kids.push_back(gen_node(depth + 1, exp_budget));
                return Expression::add(std::move(kids));
            }
            case 3: {
                std::vector<Expression> kids;
                for (int i = 0; i < 2; ++i) kids.push_back(gen_node(depth + 1, exp_budget));
                return Expression::mul(std::move(kids));
            }
            case 4:
                return Expression::neg(gen_node(depth + 1, exp_budget));
            case 5:
                return pick(2) == 0 ? Expression::sin(gen_node(depth + 1, exp_budget))
                                    : Expression::cos(gen_node(depth + 1, exp_budget));
            case 6:
                if (exp_budget > 0 && pick(2) == 0)
                    return Expression::exp(gen_node(depth + 1, exp_budget - 1));
                return Expression::int_pow(gen_node(depth + 1, exp_budget), 1 + pick(opts_.max_pow));
            case 7:
                return Expression::abs(gen_node(depth + 1, exp_budget));
            case 8: {
                std::vector<Expression> kids;
                const int k = 2 + pick(2);
                for (int i = 0; i < k; ++i) kids.push_back(gen_node(depth + 1, exp_budget));
                return Expression::max(std::move(kids));
            }
            default: {
                std::vector<Expression> kids;
                const int k = 2 + pick(2);
                for (int i = 0; i < k; ++i) kids.push_back(gen_node(depth + 1, exp_budget));
                return Expression::min(std::move(kids));
            }
        }
    }
};

/// Extended-precision recursive evaluation, independent of Expression::eval.
inline long double eval_reference(const Expression& e, const Eigen::VectorXd& x) {
    const auto& n = e.node();
    switch (n.kind) {
        case NodeKind::Constant: return static_cast<long double>(n.value);
        case NodeKind::Variable: return static_cast<long double>(x[n.index]);
        case NodeKind::Add: {
            long double s = 0;
            for (const auto& c : n.children) s += eval_reference(c, x);
            return s;
        }
        case NodeKind::Mul: {
            long double p = 1;
            for (const auto& c : n.children) p *= eval_reference(c, x);
            return p;
        }
        case NodeKind::Neg: return -eval_reference(n.children[0], x);
        case NodeKind::IntPow: {
            const long double b = eval_reference(n.children[0], x);
            long double r = 1;
            for (int k = 0; k < n.exponent; ++k) r *= b;
            return r;
        }
        case NodeKind::Sin: return std::sin(eval_reference(n.children[0], x));
        case NodeKind::Cos: return std::cos(eval_reference(n.children[0], x));
        case NodeKind::Exp: return std::exp(eval_reference(n.children[0], x));
        case NodeKind::Abs: return std::abs(eval_reference(n.children[0], x));
        case NodeKind::Max: {
            long double m = eval_reference(n.children[0], x);
            for (std::size_t i = 1; i < n.children.size(); ++i)
                m = std::max(m, eval_reference(n.children[i], x));
            return m;
        }
        case NodeKind::Min: {
            long double m = eval_reference(n.children[0], x);
            for (std::size_t i = 1; i < n.children.size(); ++i)
                m = std::min(m, eval_reference(n.children[i], x));
            return m;
        }
    }
    return 0;
}

/// Forward-mode dual number for exact derivatives of smooth trees.
struct Dual {
    double v = 0;
    double d = 0;
};

inline Dual eval_dual(const Expression& e, const Eigen::VectorXd& x, int wrt) {
    const auto& n = e.node();
    switch (n.kind) {
        case NodeKind::Constant: return {n.value, 0.0};
        case NodeKind::Variable: return {x[n.index], n.index == wrt ? 1.0 : 0.0};
        case NodeKind::Add: {
            Dual s{0, 0};
            for (const auto& c : n.children) {
                const Dual cd = eval_dual(c, x, wrt);
                s.v += cd.v;
                s.d += cd.d;
            }
            return s;
        }
        case NodeKind::Mul: {
            Dual p{1, 0};
            for (const auto& c : n.children) {
                const Dual cd = eval_dual(c, x, wrt);
                p.d = p.d * cd.v + p.v * cd.d;
                p.v *= cd.v;
            }
            return p;
        }
        case NodeKind::Neg: {
            const Dual cd = eval_dual(n.children[0], x, wrt);
            return {-cd.v, -cd.d};
        }
        case NodeKind::IntPow: {
            const Dual cd = eval_dual(n.children[0], x, wrt);
            if (n.exponent == 0) return {1.0, 0.0};
            double pow_km1 = 1.0;
            for (int k = 0; k < n.exponent - 1; ++k) pow_km1 *= cd.v;
            return {pow_km1 * cd.v, n.exponent * pow_km1 * cd.d};
        }
        case NodeKind::Sin: {
            const Dual cd = eval_dual(n.children[0], x, wrt);
            return {std::sin(cd.v), std::cos(cd.v) * cd.d};
        }
        case NodeKind::Cos: {
            const Dual cd = eval_dual(n.children[0], x, wrt);
            return {std::cos(cd.v), -std::sin(cd.v) * cd.d};
        }
        case NodeKind::Exp: {
            const Dual cd = eval_dual(n.children[0], x, wrt);
            return {std::exp(cd.v), std::exp(cd.v) * cd.d};
        }
        default:
            // Smooth trees only.
            return {0, 0};
    }
}

} // namespace vodiag_tests

#endif
