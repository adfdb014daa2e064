#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wmean {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied input was violated (bad dimension,
/// malformed spec string, domain file that does not describe a domain...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Syntax or scoping error while parsing an expression; carries the
/// zero-based character offset of the offending token.
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& message, std::size_t position)
      : InvalidInput(message + " at position " + std::to_string(position)),
        detail_(message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }
  /// The message without the position suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t position_;
};

/// Mathematical domain error while evaluating an expression (log of a
/// nonpositive number, division by zero, ...). `subexpression` is the printed
/// form of the node that failed.
class EvalError : public Error {
 public:
  EvalError(const std::string& message, std::string subexpression)
      : Error(message + " in '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// An integrand produced a non-finite value at a quadrature node.
class EvaluationFailure : public Error {
 public:
  EvaluationFailure(const std::string& message, double radius)
      : Error(message + " (radius " + std::to_string(radius) + ")"),
        radius_(radius) {}

  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

/// A numerically integrated weight does not converge at the origin.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace wmean
