#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wmean/error.hpp"
#include "wmean/expr.hpp"

using namespace wmean;

namespace {
double eval1(const char* src, double t) {
  const double v[] = {t};
  return Expr::parse(src, {"t"}).eval(std::span<const double>(v, 1));
}
}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(eval1("1 + 2 * 3", 0) == 7.0);
  CHECK(eval1("2 ^ 3 ^ 2", 0) == 512.0);
  CHECK(eval1("-2 ^ 2", 0) == -4.0);
  CHECK(eval1("2 ^ -1", 0) == 0.5);
  CHECK(eval1("8 / 4 / 2", 0) == 1.0);
  CHECK(eval1("(1 + 2) * t", 4) == 12.0);
  CHECK(eval1("1e-3 * 2.5E2", 0) == doctest::Approx(0.25));
}

TEST_CASE("constants and functions") {
  CHECK(eval1("pi", 0) == std::numbers::pi);
  CHECK(eval1("e", 0) == std::numbers::e);
  CHECK(eval1("log(e)", 0) == doctest::Approx(1.0));
  CHECK(eval1("pow(t, 3)", 2) == 8.0);
  CHECK(eval1("abs(-t) + sqrt(t) + exp(0) + sin(0) + cos(0)", 4) == 8.0);
}

TEST_CASE("bindings by name") {
  const auto e = Expr::parse("t - r", {"t", "r"});
  CHECK(e.eval(Bindings{{"t", 3.0}, {"r", 1.0}}) == 2.0);
  CHECK_THROWS_AS(e.eval(Bindings{{"t", 3.0}}), EvalError);
  CHECK(e.uses("r"));
  CHECK_FALSE(Expr::parse("t", {"t", "r"}).uses("r"));
}

TEST_CASE("parse errors carry positions") {
  auto position_of = [](const char* src) -> std::size_t {
    try {
      Expr::parse(src, {"t"});
    } catch (const ParseError& e) {
      return e.position();
    }
    return 999;
  };
  CHECK(position_of("1 + ") == 4);
  CHECK(position_of("t + x") == 4);
  CHECK(position_of("foo(t)") == 0);
  CHECK(position_of("2 $ 3") == 2);
  CHECK(position_of("(t") == 2);
  CHECK(position_of("sin(t, t)") == 0);
  CHECK_THROWS_AS(Expr::parse("   ", {"t"}), ParseError);
  CHECK_THROWS_AS(Expr::parse("t t", {"t"}), ParseError);
  try {
    Expr::parse("t + y", {"t"});
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("at position 4") != std::string::npos);
    CHECK(e.detail().find("at position") == std::string::npos);
  }
}

TEST_CASE("evaluation errors name the subexpression") {
  CHECK_THROWS_AS(eval1("log(t)", 0), EvalError);
  CHECK_THROWS_AS(eval1("1 / t", 0), EvalError);
  CHECK_THROWS_AS(eval1("sqrt(t)", -1), EvalError);
  CHECK_THROWS_AS(eval1("t ^ 0.5", -1), EvalError);
  CHECK_THROWS_AS(eval1("t ^ -1", 0), EvalError);
  CHECK_THROWS_AS(eval1("exp(t)", 1000), EvalError);
  try {
    eval1("1 + log(t - 1)", 1);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.subexpression() == "log((t - 1))");
  }
}

TEST_CASE("printing round-trips") {
  for (const char* src : {"1 + 2 * t", "-t ^ 2", "log(t / 3) - pow(t, 0.1)", "2^3^t",
                          "sin(pi * t) / (1 + e)", "0.1 + 1e-17 * t"}) {
    const auto a = Expr::parse(src, {"t"});
    const auto b = Expr::parse(a.str(), {"t"});
    CHECK(a == b);
    CHECK(a.str() == b.str());
  }
  CHECK_FALSE(Expr::parse("t + 1", {"t"}) == Expr::parse("1 + t", {"t"}));
}
