#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wmean {

using Bindings = std::map<std::string, double, std::less<>>;

/// Immutable scalar expression over a fixed set of named variables.
///
/// Grammar, loosest binding first:
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          (right-associative)
///   primary := number | name | name '(' args ')' | '(' sum ')'
/// Names: the allowed variables, constants `pi` and `e`, functions
/// log exp sin cos sqrt abs (one argument) and pow (two arguments).
///
/// Evaluation never returns NaN or infinity: every domain violation raises
/// EvalError naming the failing subexpression.
class Expr {
 public:
  enum class Op { Number, Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
  enum class Func { Log, Exp, Sin, Cos, Sqrt, Abs, Pow };

  struct Node;

  /// Parses `src`; identifiers must be drawn from `allowed_vars`, whose order
  /// defines the slot order used by eval(span).
  static Expr parse(std::string_view src, const std::vector<std::string>& allowed_vars);

  /// Evaluates with values given in slot order.
  double eval(std::span<const double> values) const;
  double eval(const Bindings& bindings) const;

  /// Fully parenthesized text that parses back to an identical tree.
  std::string str() const;

  const std::vector<std::string>& variables() const noexcept { return vars_; }
  bool uses(std::string_view name) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  Expr(std::shared_ptr<const Node> root, std::vector<std::string> vars)
      : root_(std::move(root)), vars_(std::move(vars)) {}

  std::shared_ptr<const Node> root_;
  std::vector<std::string> vars_;
};

struct Expr::Node {
  Op op = Op::Number;
  Func func = Func::Log;
  double number = 0.0;
  int slot = -1;
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;
};

}  // namespace wmean
