#ifndef VODIAG_PROBLEM_IO_HPP
#define VODIAG_PROBLEM_IO_HPP

#include "vodiag/problem.hpp"

#include <string>

namespace vodiag {

/// Parses the expression mini-grammar: infix + - * with integer ^, unary -,
/// sin/cos/exp/abs and n-ary max/min, variables x1..xn, decimal constants.
/// Precedence ^ > unary - > * > + -, left associative. Positions in
/// ParseError are 1-based within the given text.
Expression parse_expression(const std::string& text);

/// Parses a problem document with fields n, m, objectives, constraints.
/// n and m may be omitted and are then inferred from the objectives and
/// constraint block. Parse errors carry line/column positions.
///
///   # half-line example
///   n: 1
///   m: 2
///   objectives: ["-x1^2", "x1"]
///   constraints: box [[0, inf]]
///
/// Constraint forms: "full", "box [[lo, hi], ...]" with -inf/inf bounds,
/// "polyhedron [\"<linear expr> <= <const>\", ...]",
/// "smooth [\"<smooth expr> <= 0\", ...]".
Problem parse_problem(const std::string& text);

/// Canonical rendering; parse_problem(render_problem(p)) is structurally
/// identical to p.
std::string render_problem(const Problem& problem);

/// FNV-1a hash of the canonical rendering, as a hex string.
std::string problem_digest(const Problem& problem);

} // namespace vodiag

#endif
