#ifndef VODIAG_ERRORS_HPP
#define VODIAG_ERRORS_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace vodiag {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input: dimension mismatch, invalid parameter, size guard exceeded.
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(what) {}
};

/// An operation was called outside its stated precondition.
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(what) {}
};

/// Active smooth constraint with zero or linearly dependent gradients.
class DegenerateConstraintError : public Error {
public:
    explicit DegenerateConstraintError(const std::string& what) : Error(what) {}
};

/// Solver failed to converge; carries the best iterate found so far.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, double best_value, Eigen::VectorXd best_point)
        : Error(what), best_value(best_value), best_point(std::move(best_point)) {}

    double best_value;
    Eigen::VectorXd best_point;
};

/// Text parse error with 1-based position information.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line(line), column(column) {}

    int line;
    int column;
};

} // namespace vodiag

#endif
