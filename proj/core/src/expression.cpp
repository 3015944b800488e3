#include "vodiag/expression.hpp"

#include "vodiag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vodiag {

namespace {

double int_pow_value(double base, int exponent) {
    // Exponentiation by squaring keeps results bit-deterministic.
    double result = 1.0;
    double factor = base;
    int e = exponent;
    while (e > 0) {
        if (e & 1) result *= factor;
        factor *= factor;
        e >>= 1;
    }
    return result;
}

} // namespace

std::shared_ptr<const Expression::Node> Expression::constant_node(double c) {
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Constant;
    node->value = c;
    return node;
}

Expression Expression::constant(double c) { return Expression(constant_node(c)); }

Expression Expression::variable(int index) {
    if (index < 0) throw InputError("variable index must be nonnegative");
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Variable;
    node->index = index;
    return Expression(std::move(node));
}

Expression Expression::add(std::vector<Expression> children) {
    if (children.empty()) throw InputError("add needs at least one child");
    if (children.size() == 1) return children[0];
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Add;
    for (auto& c : children) {
        if (c.kind() == NodeKind::Add) {
            for (const auto& grand : c.node().children) node->children.push_back(grand);
        } else {
            node->children.push_back(std::move(c));
        }
    }
    return Expression(std::move(node));
}

Expression Expression::mul(std::vector<Expression> children) {
    if (children.empty()) throw InputError("mul needs at least one child");
    if (children.size() == 1) return children[0];
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Mul;
    for (auto& c : children) {
        if (c.kind() == NodeKind::Mul) {
            for (const auto& grand : c.node().children) node->children.push_back(grand);
        } else {
            node->children.push_back(std::move(c));
        }
    }
    return Expression(std::move(node));
}

Expression Expression::neg(Expression child) {
    // Fold negated literals so that "-2" parses and renders as one node.
    if (child.kind() == NodeKind::Constant) return constant(-child.node().value);
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Neg;
    node->children.push_back(std::move(child));
    return Expression(std::move(node));
}

Expression Expression::int_pow(Expression child, int exponent) {
    if (exponent < 0) throw InputError("integer power exponent must be nonnegative");
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::IntPow;
    node->exponent = exponent;
    node->children.push_back(std::move(child));
    return Expression(std::move(node));
}

Expression Expression::sin(Expression child) {
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Sin;
    node->children.push_back(std::move(child));
    return Expression(std::move(node));
}

Expression Expression::cos(Expression child) {
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Cos;
    node->children.push_back(std::move(child));
    return Expression(std::move(node));
}

Expression Expression::exp(Expression child) {
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Exp;
    node->children.push_back(std::move(child));
    return Expression(std::move(node));
}

Expression Expression::abs(Expression child) {
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Abs;
    node->children.push_back(std::move(child));
    return Expression(std::move(node));
}

Expression Expression::max(std::vector<Expression> children) {
    if (children.size() < 2) throw InputError("max needs at least two children");
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Max;
    node->children = std::move(children);
    return Expression(std::move(node));
}

Expression Expression::min(std::vector<Expression> children) {
    if (children.size() < 2) throw InputError("min needs at least two children");
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Min;
    node->children = std::move(children);
    return Expression(std::move(node));
}

double Expression::eval(const Eigen::VectorXd& x) const {
    const Node& n = *node_;
    switch (n.kind) {
        case NodeKind::Constant: return n.value;
        case NodeKind::Variable:
            if (n.index >= x.size())
                throw InputError("variable x" + std::to_string(n.index + 1) +
                                 " out of range for point of dimension " + std::to_string(x.size()));
            return x[n.index];
        case NodeKind::Add: {
            double s = 0.0;
            for (const auto& c : n.children) s += c.eval(x);
            return s;
        }
        case NodeKind::Mul: {
            double p = 1.0;
            for (const auto& c : n.children) p *= c.eval(x);
            return p;
        }
        case NodeKind::Neg: return -n.children[0].eval(x);
        case NodeKind::IntPow: return int_pow_value(n.children[0].eval(x), n.exponent);
        case NodeKind::Sin: return std::sin(n.children[0].eval(x));
        case NodeKind::Cos: return std::cos(n.children[0].eval(x));
        case NodeKind::Exp: return std::exp(n.children[0].eval(x));
        case NodeKind::Abs: return std::abs(n.children[0].eval(x));
        case NodeKind::Max: {
            double m = n.children[0].eval(x);
            for (std::size_t i = 1; i < n.children.size(); ++i) m = std::max(m, n.children[i].eval(x));
            return m;
        }
        case NodeKind::Min: {
            double m = n.children[0].eval(x);
            for (std::size_t i = 1; i < n.children.size(); ++i) m = std::min(m, n.children[i].eval(x));
            return m;
        }
    }
    throw Error("corrupt expression node");
}

int Expression::min_dimension() const {
    const Node& n = *node_;
    if (n.kind == NodeKind::Variable) return n.index + 1;
    int d = 0;
    for (const auto& c : n.children) d = std::max(d, c.min_dimension());
    return d;
}

bool Expression::is_smooth() const {
    const Node& n = *node_;
    if (n.kind == NodeKind::Abs || n.kind == NodeKind::Max || n.kind == NodeKind::Min) return false;
    for (const auto& c : n.children)
        if (!c.is_smooth()) return false;
    return true;
}

bool Expression::same_as(const Expression& other) const {
    const Node& a = *node_;
    const Node& b = *other.node_;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Constant:
            if (a.value != b.value) return false;
            break;
        case NodeKind::Variable:
            if (a.index != b.index) return false;
            break;
        case NodeKind::IntPow:
            if (a.exponent != b.exponent) return false;
            break;
        default: break;
    }
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!a.children[i].same_as(b.children[i])) return false;
    return true;
}

namespace {

// Rendering precedence levels: additive < multiplicative < unary minus < power.
enum Prec { PrecAdd = 0, PrecMul = 1, PrecNeg = 2, PrecPow = 3, PrecAtom = 4 };

void render(const Expression& e, std::ostream& out, int parent_prec);

void render_number(double v, std::ostream& out) {
    std::ostringstream tmp;
    tmp.precision(17);
    tmp << v;
    std::string s = tmp.str();
    out << s;
}

int node_prec(const Expression::Node& n) {
    switch (n.kind) {
        case NodeKind::Add: return PrecAdd;
        case NodeKind::Mul: return PrecMul;
        case NodeKind::Neg: return PrecNeg;
        case NodeKind::IntPow: return PrecPow;
        case NodeKind::Constant:
            // A negative literal prints with a leading minus and binds like
            // a unary minus, e.g. (-1.5)^2 needs its parentheses.
            return n.value < 0 ? PrecNeg : PrecAtom;
        default: return PrecAtom;
    }
}

void render(const Expression& e, std::ostream& out, int parent_prec) {
    const auto& n = e.node();
    const int prec = node_prec(n);
    const bool paren = prec < parent_prec;
    if (paren) out << "(";
    switch (n.kind) {
        case NodeKind::Constant:
            if (n.value < 0) {
                // negative literal renders like a unary minus term
                out << "-";
                render_number(-n.value, out);
            } else {
                render_number(n.value, out);
            }
            break;
        case NodeKind::Variable: out << "x" << (n.index + 1); break;
        case NodeKind::Add:
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i > 0 && n.children[i].kind() == NodeKind::Neg) {
                    out << " - ";
                    render(n.children[i].node().children[0], out, PrecNeg + 1);
                    continue;
                }
                if (i > 0 && n.children[i].kind() == NodeKind::Constant &&
                    n.children[i].node().value < 0) {
                    out << " - ";
                    render_number(-n.children[i].node().value, out);
                    continue;
                }
                if (i > 0) out << " + ";
                render(n.children[i], out, PrecAdd + 1);
            }
            break;
        case NodeKind::Mul:
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i > 0) out << "*";
                render(n.children[i], out, PrecMul + 1);
            }
            break;
        case NodeKind::Neg:
            out << "-";
            render(n.children[0], out, PrecNeg + 1);
            break;
        case NodeKind::IntPow:
            render(n.children[0], out, PrecPow + 1);
            out << "^" << n.exponent;
            break;
        case NodeKind::Sin:
        case NodeKind::Cos:
        case NodeKind::Exp:
        case NodeKind::Abs: {
            const char* name = n.kind == NodeKind::Sin   ? "sin"
                               : n.kind == NodeKind::Cos ? "cos"
                               : n.kind == NodeKind::Exp ? "exp"
                                                         : "abs";
            out << name << "(";
            render(n.children[0], out, PrecAdd);
            out << ")";
            break;
        }
        case NodeKind::Max:
        case NodeKind::Min: {
            out << (n.kind == NodeKind::Max ? "max(" : "min(");
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i > 0) out << ", ";
                render(n.children[i], out, PrecAdd);
            }
            out << ")";
            break;
        }
    }
    if (paren) out << ")";
}

} // namespace

std::string Expression::to_string() const {
    std::ostringstream out;
    render(*this, out, PrecAdd);
    return out.str();
}

} // namespace vodiag
