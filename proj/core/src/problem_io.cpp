#include "vodiag/problem_io.hpp"

#include "vodiag/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <sstream>

namespace vodiag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    explicit Cursor(const std::string& t) : text(t) {}

    bool done() const { return pos >= text.size(); }
    char peek() const { return done() ? '\0' : text[pos]; }

    char advance() {
        const char c = text[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (!done()) {
            const char c = peek();
            if (c == '#') {
                while (!done() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, col); }
};

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

class ExprParser {
public:
    ExprParser(const std::string& text, int base_line, int base_col)
        : cur_(text), base_line_(base_line), base_col_(base_col) {}

    Expression parse() {
        skip();
        Expression e = parse_sum();
        skip();
        if (!cur_.done()) fail("unexpected trailing input in expression");
        return e;
    }

private:
    Cursor cur_;
    int base_line_;
    int base_col_;

    void skip() {
        while (!cur_.done() && std::isspace(static_cast<unsigned char>(cur_.peek()))) cur_.advance();
    }

    [[noreturn]] void fail(const std::string& msg) {
        // Expression strings are single-line; map onto the document position.
        throw ParseError(msg, base_line_ + cur_.line - 1,
                         cur_.line == 1 ? base_col_ + cur_.col - 1 : cur_.col);
    }

    Expression parse_sum() {
        std::vector<Expression> children;
        children.push_back(parse_term());
        while (true) {
            skip();
            const char c = cur_.peek();
            if (c == '+') {
                cur_.advance();
                children.push_back(parse_term());
            } else if (c == '-') {
                cur_.advance();
                children.push_back(Expression::neg(parse_term()));
            } else {
                break;
            }
        }
        return children.size() == 1 ? children[0] : Expression::add(std::move(children));
    }

    Expression parse_term() {
        std::vector<Expression> children;
        children.push_back(parse_unary());
        while (true) {
            skip();
            if (cur_.peek() == '*') {
                cur_.advance();
                children.push_back(parse_unary());
            } else {
                break;
            }
        }
        return children.size() == 1 ? children[0] : Expression::mul(std::move(children));
    }

    Expression parse_unary() {
        skip();
        if (cur_.peek() == '-') {
            cur_.advance();
            return Expression::neg(parse_unary());
        }
        if (cur_.peek() == '+') {
            cur_.advance();
            return parse_unary();
        }
        return parse_power();
    }

    Expression parse_power() {
        Expression base = parse_atom();
        while (true) {
            skip();
            if (cur_.peek() != '^') break;
            cur_.advance();
            skip();
            if (!std::isdigit(static_cast<unsigned char>(cur_.peek())))
                fail("exponent must be a nonnegative integer literal");
            long exponent = 0;
            while (std::isdigit(static_cast<unsigned char>(cur_.peek()))) {
                exponent = exponent * 10 + (cur_.advance() - '0');
                if (exponent > 1'000'000) fail("exponent too large");
            }
            base = Expression::int_pow(std::move(base), static_cast<int>(exponent));
        }
        return base;
    }

    Expression parse_atom() {
        skip();
        const char c = cur_.peek();
        if (c == '(') {
            cur_.advance();
            Expression e = parse_sum();
            skip();
            if (cur_.peek() != ')') fail("expected ')'");
            cur_.advance();
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        fail("expected a number, variable, function or '('");
    }

    Expression parse_number() {
        const std::size_t start = cur_.pos;
        while (std::isdigit(static_cast<unsigned char>(cur_.peek()))) cur_.advance();
        if (cur_.peek() == '.') {
            cur_.advance();
            while (std::isdigit(static_cast<unsigned char>(cur_.peek()))) cur_.advance();
        }
        if (cur_.peek() == 'e' || cur_.peek() == 'E') {
            const std::size_t mark = cur_.pos;
            cur_.advance();
            if (cur_.peek() == '+' || cur_.peek() == '-') cur_.advance();
            if (std::isdigit(static_cast<unsigned char>(cur_.peek()))) {
                while (std::isdigit(static_cast<unsigned char>(cur_.peek()))) cur_.advance();
            } else {
                // Not an exponent after all; rewind is safe on one line.
                cur_.col -= static_cast<int>(cur_.pos - mark);
                cur_.pos = mark;
            }
        }
        const std::string token = cur_.text.substr(start, cur_.pos - start);
        if (token.empty() || token == ".") fail("malformed number");
        return Expression::constant(std::strtod(token.c_str(), nullptr));
    }

    Expression parse_identifier() {
        const std::size_t start = cur_.pos;
        while (std::isalnum(static_cast<unsigned char>(cur_.peek()))) cur_.advance();
        const std::string name = cur_.text.substr(start, cur_.pos - start);

        if (name.size() >= 2 && name[0] == 'x' &&
            std::all_of(name.begin() + 1, name.end(),
                        [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
            const long idx = std::strtol(name.c_str() + 1, nullptr, 10);
            if (idx < 1) fail("variable indices start at x1");
            return Expression::variable(static_cast<int>(idx - 1));
        }

        const bool is_unary = name == "sin" || name == "cos" || name == "exp" || name == "abs";
        const bool is_nary = name == "max" || name == "min";
        if (!is_unary && !is_nary) fail("unknown identifier '" + name + "'");

        skip();
        if (cur_.peek() != '(') fail("expected '(' after function name");
        cur_.advance();
        std::vector<Expression> args;
        args.push_back(parse_sum());
        while (true) {
            skip();
            if (cur_.peek() == ',') {
                cur_.advance();
                args.push_back(parse_sum());
            } else {
                break;
            }
        }
        skip();
        if (cur_.peek() != ')') fail("expected ')'");
        cur_.advance();

        if (is_unary) {
            if (args.size() != 1) fail(name + " takes exactly one argument");
            if (name == "sin") return Expression::sin(std::move(args[0]));
            if (name == "cos") return Expression::cos(std::move(args[0]));
            if (name == "exp") return Expression::exp(std::move(args[0]));
            return Expression::abs(std::move(args[0]));
        }
        if (args.size() < 2) fail(name + " takes at least two arguments");
        return name == "max" ? Expression::max(std::move(args)) : Expression::min(std::move(args));
    }
};

// ---------------------------------------------------------------------------
// Problem document parser
// ---------------------------------------------------------------------------

struct PositionedString {
    std::string value;
    int line = 1;
    int col = 1;
};

struct LinearRow {
    Eigen::VectorXd normal;
    double offset;
};

bool is_linear(const Expression& e) {
    const auto& n = e.node();
    switch (n.kind) {
        case NodeKind::Constant: return true;
        case NodeKind::Variable: return true;
        case NodeKind::Neg: return is_linear(n.children[0]);
        case NodeKind::Add:
            return std::all_of(n.children.begin(), n.children.end(),
                               [](const Expression& c) { return is_linear(c); });
        case NodeKind::Mul: {
            int nonconst = 0;
            for (const auto& c : n.children) {
                if (c.min_dimension() > 0) {
                    ++nonconst;
                    if (!is_linear(c)) return false;
                }
            }
            return nonconst <= 1;
        }
        case NodeKind::IntPow:
            if (n.children[0].min_dimension() == 0) return true;
            return n.exponent <= 1 && is_linear(n.children[0]);
        default:
            return e.min_dimension() == 0;
    }
}

} // namespace

Expression parse_expression(const std::string& text) {
    return ExprParser(text, 1, 1).parse();
}

namespace {

Expression parse_expression_at(const PositionedString& s) {
    return ExprParser(s.value, s.line, s.col + 1).parse();  // +1 for the opening quote
}

class ProblemParser {
public:
    explicit ProblemParser(const std::string& text) : cur_(text) {}

    Problem parse() {
        while (true) {
            cur_.skip_space_and_comments();
            if (cur_.done()) break;
            if (cur_.peek() == ',') {
                cur_.advance();
                continue;
            }
            parse_field();
        }
        return build();
    }

private:
    Cursor cur_;
    std::optional<int> n_, m_;
    std::vector<PositionedString> objectives_;
    bool have_objectives_ = false;
    bool have_constraints_ = false;

    enum class ConstraintKind { Full, Box, Polyhedron, Smooth };
    ConstraintKind ckind_ = ConstraintKind::Full;
    std::vector<std::pair<double, double>> box_rows_;
    std::vector<PositionedString> constraint_rows_;

    std::string read_word() {
        cur_.skip_space_and_comments();
        const std::size_t start = cur_.pos;
        while (!cur_.done() && (std::isalnum(static_cast<unsigned char>(cur_.peek())) ||
                                cur_.peek() == '_' || cur_.peek() == '-'))
            cur_.advance();
        return cur_.text.substr(start, cur_.pos - start);
    }

    void expect(char c, const char* what) {
        cur_.skip_space_and_comments();
        if (cur_.peek() != c) cur_.fail(std::string("expected ") + what);
        cur_.advance();
    }

    int read_int() {
        cur_.skip_space_and_comments();
        bool negative = false;
        if (cur_.peek() == '-') {
            negative = true;
            cur_.advance();
        }
        if (!std::isdigit(static_cast<unsigned char>(cur_.peek()))) cur_.fail("expected an integer");
        long v = 0;
        while (std::isdigit(static_cast<unsigned char>(cur_.peek()))) v = v * 10 + (cur_.advance() - '0');
        return negative ? static_cast<int>(-v) : static_cast<int>(v);
    }

    double read_bound() {
        cur_.skip_space_and_comments();
        const int line = cur_.line, col = cur_.col;
        bool negative = false;
        if (cur_.peek() == '-') {
            negative = true;
            cur_.advance();
        } else if (cur_.peek() == '+') {
            cur_.advance();
        }
        if (std::isalpha(static_cast<unsigned char>(cur_.peek()))) {
            const std::string word = read_word();
            if (word != "inf") throw ParseError("expected a number or inf", line, col);
            return negative ? -kInf : kInf;
        }
        const std::size_t start = cur_.pos;
        while (!cur_.done() && (std::isdigit(static_cast<unsigned char>(cur_.peek())) ||
                                cur_.peek() == '.' || cur_.peek() == 'e' || cur_.peek() == 'E' ||
                                ((cur_.peek() == '+' || cur_.peek() == '-') &&
                                 (cur_.text[cur_.pos - 1] == 'e' || cur_.text[cur_.pos - 1] == 'E'))))
            cur_.advance();
        const std::string token = cur_.text.substr(start, cur_.pos - start);
        if (token.empty()) throw ParseError("expected a number or inf", line, col);
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) throw ParseError("malformed number", line, col);
        return negative ? -v : v;
    }

    PositionedString read_string() {
        cur_.skip_space_and_comments();
        if (cur_.peek() != '"') cur_.fail("expected '\"'");
        PositionedString out;
        out.line = cur_.line;
        out.col = cur_.col;
        cur_.advance();
        while (!cur_.done() && cur_.peek() != '"') {
            if (cur_.peek() == '\n') cur_.fail("unterminated string");
            out.value.push_back(cur_.advance());
        }
        if (cur_.done()) cur_.fail("unterminated string");
        cur_.advance();
        return out;
    }

    std::vector<PositionedString> read_string_list() {
        std::vector<PositionedString> out;
        expect('[', "'['");
        cur_.skip_space_and_comments();
        if (cur_.peek() == ']') {
            cur_.advance();
            return out;
        }
        out.push_back(read_string());
        while (true) {
            cur_.skip_space_and_comments();
            if (cur_.peek() == ',') {
                cur_.advance();
                out.push_back(read_string());
            } else {
                break;
            }
        }
        expect(']', "']'");
        return out;
    }

    void parse_field() {
        const int line = cur_.line, col = cur_.col;
        const std::string key = read_word();
        if (key.empty()) cur_.fail("expected a field name");
        expect(':', "':' after field name");

        if (key == "n") {
            if (n_) throw ParseError("duplicate field n", line, col);
            n_ = read_int();
        } else if (key == "m") {
            if (m_) throw ParseError("duplicate field m", line, col);
            m_ = read_int();
        } else if (key == "objectives") {
            if (have_objectives_) throw ParseError("duplicate field objectives", line, col);
            have_objectives_ = true;
            objectives_ = read_string_list();
            if (objectives_.empty()) throw ParseError("objectives list must be nonempty", line, col);
        } else if (key == "constraints") {
            if (have_constraints_) throw ParseError("duplicate field constraints", line, col);
            have_constraints_ = true;
            const int kline = cur_.line, kcol = cur_.col;
            const std::string kind = read_word();
            if (kind == "full") {
                ckind_ = ConstraintKind::Full;
            } else if (kind == "box") {
                ckind_ = ConstraintKind::Box;
                expect('[', "'[' after box");
                while (true) {
                    expect('[', "'[' opening an interval");
                    const double lo = read_bound();
                    expect(',', "',' inside an interval");
                    const double hi = read_bound();
                    expect(']', "']' closing an interval");
                    box_rows_.emplace_back(lo, hi);
                    cur_.skip_space_and_comments();
                    if (cur_.peek() == ',') {
                        cur_.advance();
                        continue;
                    }
                    break;
                }
                expect(']', "']' closing the box");
            } else if (kind == "polyhedron") {
                ckind_ = ConstraintKind::Polyhedron;
                constraint_rows_ = read_string_list();
                if (constraint_rows_.empty())
                    throw ParseError("polyhedron needs at least one row", kline, kcol);
            } else if (kind == "smooth") {
                ckind_ = ConstraintKind::Smooth;
                constraint_rows_ = read_string_list();
                if (constraint_rows_.empty())
                    throw ParseError("smooth constraint list must be nonempty", kline, kcol);
            } else {
                throw ParseError("constraints must be full, box, polyhedron or smooth", kline, kcol);
            }
        } else {
            throw ParseError("unknown field '" + key + "'", line, col);
        }
    }

    struct SplitRow {
        Expression lhs;
        Expression rhs;
    };

    SplitRow split_row(const PositionedString& row) {
        const std::size_t at = row.value.find("<=");
        if (at == std::string::npos)
            throw ParseError("constraint row must contain '<='", row.line, row.col);
        PositionedString lhs{row.value.substr(0, at), row.line, row.col};
        PositionedString rhs{row.value.substr(at + 2), row.line,
                             row.col + static_cast<int>(at) + 2};
        return SplitRow{parse_expression_at(lhs), parse_expression_at(rhs)};
    }

    Problem build() {
        if (!have_objectives_) throw ParseError("missing objectives field", cur_.line, cur_.col);
        if (!have_constraints_) throw ParseError("missing constraints field", cur_.line, cur_.col);

        std::vector<Expression> objectives;
        int max_var = 0;
        for (const auto& s : objectives_) {
            objectives.push_back(parse_expression_at(s));
            max_var = std::max(max_var, objectives.back().min_dimension());
        }
        if (m_ && *m_ != static_cast<int>(objectives.size()))
            throw ParseError("m does not match the number of objectives", 1, 1);
        const int m = static_cast<int>(objectives.size());

        // Pre-parse constraint rows to infer n.
        std::vector<SplitRow> rows;
        for (const auto& r : constraint_rows_) {
            rows.push_back(split_row(r));
            max_var = std::max(max_var, rows.back().lhs.min_dimension());
        }

        int n = 0;
        if (n_) {
            n = *n_;
        } else if (ckind_ == ConstraintKind::Box) {
            n = static_cast<int>(box_rows_.size());
        } else {
            n = std::max(1, max_var);
        }
        if (n < max_var)
            throw ParseError("n is smaller than the largest variable index used", 1, 1);

        FeasibleSet feasible = FeasibleSet::full_space();
        try {
            switch (ckind_) {
                case ConstraintKind::Full: break;
                case ConstraintKind::Box: {
                    if (static_cast<int>(box_rows_.size()) != n)
                        throw InputError("box interval count does not match n");
                    Eigen::VectorXd lo(n), hi(n);
                    for (int i = 0; i < n; ++i) {
                        lo[i] = box_rows_[static_cast<std::size_t>(i)].first;
                        hi[i] = box_rows_[static_cast<std::size_t>(i)].second;
                    }
                    feasible = FeasibleSet::box(std::move(lo), std::move(hi));
                    break;
                }
                case ConstraintKind::Polyhedron: {
                    std::vector<Eigen::VectorXd> normals;
                    std::vector<double> offsets;
                    for (std::size_t j = 0; j < rows.size(); ++j) {
                        const auto& row = rows[j];
                        if (!is_linear(row.lhs))
                            throw ParseError("polyhedron row must have a linear left side",
                                             constraint_rows_[j].line, constraint_rows_[j].col);
                        if (row.rhs.min_dimension() != 0)
                            throw ParseError("polyhedron row must have a constant right side",
                                             constraint_rows_[j].line, constraint_rows_[j].col);
                        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
                        const double c0 = row.lhs.eval(zero);
                        Eigen::VectorXd normal(n);
                        for (int i = 0; i < n; ++i) {
                            Eigen::VectorXd e = zero;
                            e[i] = 1.0;
                            normal[i] = row.lhs.eval(e) - c0;
                        }
                        normals.push_back(std::move(normal));
                        offsets.push_back(row.rhs.eval(zero) - c0);
                    }
                    feasible = FeasibleSet::polyhedron(std::move(normals), std::move(offsets));
                    break;
                }
                case ConstraintKind::Smooth: {
                    std::vector<Expression> gs;
                    for (std::size_t j = 0; j < rows.size(); ++j) {
                        const auto& row = rows[j];
                        if (row.rhs.min_dimension() != 0 ||
                            row.rhs.eval(Eigen::VectorXd::Zero(n)) != 0.0)
                            throw ParseError("smooth rows must end in '<= 0'",
                                             constraint_rows_[j].line, constraint_rows_[j].col);
                        gs.push_back(row.lhs);
                    }
                    feasible = FeasibleSet::smooth_ineq(std::move(gs));
                    break;
                }
            }
            return Problem(n, m, std::move(objectives), std::move(feasible));
        } catch (const InputError& err) {
            throw ParseError(err.what(), 1, 1);
        }
    }
};

void render_double(std::ostringstream& out, double v) {
    if (v == kInf) {
        out << "inf";
    } else if (v == -kInf) {
        out << "-inf";
    } else {
        std::ostringstream tmp;
        tmp.precision(17);
        tmp << v;
        out << tmp.str();
    }
}

} // namespace

Problem parse_problem(const std::string& text) { return ProblemParser(text).parse(); }

std::string render_problem(const Problem& problem) {
    std::ostringstream out;
    out << "n: " << problem.n() << "\n";
    out << "m: " << problem.m() << "\n";
    out << "objectives: [";
    for (int i = 0; i < problem.m(); ++i) {
        if (i) out << ", ";
        out << '"' << problem.objective(i).to_string() << '"';
    }
    out << "]\n";
    out << "constraints: ";
    const FeasibleSet& set = problem.feasible();
    if (set.is_full_space()) {
        out << "full\n";
    } else if (const auto* b = set.as_box()) {
        out << "box [";
        for (Eigen::Index i = 0; i < b->lower.size(); ++i) {
            if (i) out << ", ";
            out << "[";
            render_double(out, b->lower[i]);
            out << ", ";
            render_double(out, b->upper[i]);
            out << "]";
        }
        out << "]\n";
    } else if (const auto* p = set.as_polyhedron()) {
        out << "polyhedron [";
        for (std::size_t j = 0; j < p->normals.size(); ++j) {
            if (j) out << ", ";
            out << '"';
            bool first = true;
            for (Eigen::Index i = 0; i < p->normals[j].size(); ++i) {
                const double a = p->normals[j][i];
                if (a == 0.0) continue;
                if (!first) out << " + ";
                render_double(out, a);
                out << "*x" << (i + 1);
                first = false;
            }
            if (first) out << "0";
            out << " <= ";
            render_double(out, p->offsets[j]);
            out << '"';
        }
        out << "]\n";
    } else {
        const auto* s = set.as_smooth();
        out << "smooth [";
        for (std::size_t j = 0; j < s->constraints.size(); ++j) {
            if (j) out << ", ";
            out << '"' << s->constraints[j].to_string() << " <= 0\"";
        }
        out << "]\n";
    }
    return out.str();
}

std::string problem_digest(const Problem& problem) {
    const std::string text = render_problem(problem);
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << hash;
    return out.str();
}

} // namespace vodiag
