#ifndef VODIAG_EXPRESSION_HPP
#define VODIAG_EXPRESSION_HPP

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

namespace vodiag {

enum class NodeKind {
    Constant,
    Variable,
    Add,
    Mul,
    Neg,
    IntPow,
    Sin,
    Cos,
    Exp,
    Abs,
    Max,
    Min,
};

/// Immutable scalar expression tree over variables x0..x(n-1).
///
/// The node set is fixed so that every expression is locally Lipschitz and
/// has a polyhedral subgradient over-approximation: +, *, negation,
/// nonnegative integer powers, sin, cos, exp, abs, max, min. There is no
/// division and no fractional power. Trees are shared immutably, so copies
/// are cheap and all operations on them are thread safe.
class Expression {
public:
    struct Node {
        NodeKind kind = NodeKind::Constant;
        double value = 0.0;        // Constant
        int index = 0;             // Variable
        int exponent = 0;          // IntPow, always >= 0
        std::vector<Expression> children;
    };

    Expression() : node_(constant_node(0.0)) {}

    static Expression constant(double c);
    static Expression variable(int index);
    /// n-ary sum; nested Add children are flattened.
    static Expression add(std::vector<Expression> children);
    /// n-ary product; nested Mul children are flattened.
    static Expression mul(std::vector<Expression> children);
    static Expression neg(Expression child);
    static Expression int_pow(Expression child, int exponent);
    static Expression sin(Expression child);
    static Expression cos(Expression child);
    static Expression exp(Expression child);
    static Expression abs(Expression child);
    static Expression max(std::vector<Expression> children);
    static Expression min(std::vector<Expression> children);

    const Node& node() const { return *node_; }
    NodeKind kind() const { return node_->kind; }

    /// Recursive evaluation at a finite point. Throws InputError if some
    /// variable index is >= x.size().
    double eval(const Eigen::VectorXd& x) const;

    /// Largest variable index occurring in the tree plus one (0 if none).
    int min_dimension() const;

    /// True if the tree contains no Abs/Max/Min node.
    bool is_smooth() const;

    /// Structural equality (same shape, same constants).
    bool same_as(const Expression& other) const;

    /// Canonical infix rendering in the problem-file mini-grammar,
    /// variables printed 1-based as x1..xn.
    std::string to_string() const;

private:
    explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static std::shared_ptr<const Node> constant_node(double c);

    std::shared_ptr<const Node> node_;
};

inline Expression operator+(const Expression& a, const Expression& b) {
    return Expression::add({a, b});
}
inline Expression operator*(const Expression& a, const Expression& b) {
    return Expression::mul({a, b});
}
inline Expression operator-(const Expression& a) { return Expression::neg(a); }
inline Expression operator-(const Expression& a, const Expression& b) {
    return Expression::add({a, Expression::neg(b)});
}

} // namespace vodiag

#endif
