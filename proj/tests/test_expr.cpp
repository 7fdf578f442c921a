// Expression grammar: parsing, evaluation, precedence, domain failures.

#include <cmath>
#include <vector>

#include "core/error.hpp"
#include "core/expr.hpp"
#include "doctest.h"

using cms::Expr;

namespace {
double ev(const std::string& text, std::vector<double> vars = {}) {
  auto r = Expr::parse(text).eval(vars);
  REQUIRE(r.has_value());
  return *r;
}
bool fails(const std::string& text, std::vector<double> vars = {}) {
  return !Expr::parse(text).eval(vars).has_value();
}
}  // namespace

TEST_CASE("arithmetic and precedence") {
  CHECK(ev("1 + 2 * 3") == 7.0);
  CHECK(ev("(1 + 2) * 3") == 9.0);
  CHECK(ev("2 ^ 3 ^ 2") == 512.0);  // right associative
  CHECK(ev("-2 ^ 2") == -4.0);      // unary minus binds looser than ^
  CHECK(ev("10 / 4") == 2.5);
  CHECK(ev("7 - 3 - 2") == 2.0);  // left associative
}

TEST_CASE("comparisons and boolean logic") {
  CHECK(ev("1 < 2") == 1.0);
  CHECK(ev("2 <= 2") == 1.0);
  CHECK(ev("3 == 3 && 1 != 2") == 1.0);
  CHECK(ev("0 || 2 > 5") == 0.0);
  CHECK(ev("!0") == 1.0);
  CHECK(ev("!3") == 0.0);
  // && / || short-circuit: the unevaluated branch may be out of domain.
  CHECK(ev("0 && log(0)") == 0.0);
  CHECK(ev("1 || sqrt(-1)") == 1.0);
}

TEST_CASE("variables and kinds") {
  Expr e = Expr::parse("x0 + 2 * x2");
  CHECK(e.var_kind() == 'x');
  CHECK(e.max_var_index() == 2);
  CHECK(*e.eval(std::vector<double>{1.0, 99.0, 3.0}) == 7.0);

  Expr w = Expr::parse("(s0 == 1) * (s1 >= 0)");
  CHECK(w.var_kind() == 's');
  CHECK(w.max_var_index() == 1);
  CHECK(*w.eval(std::vector<double>{1.0, 0.0}) == 1.0);
  CHECK(*w.eval(std::vector<double>{1.0, -1.0}) == 0.0);

  // Mixing coordinate and symbol variables is a parse error.
  CHECK_THROWS_AS(Expr::parse("x0 + s0"), cms::Error);
}

TEST_CASE("functions and constants") {
  CHECK(ev("sin(0)") == 0.0);
  CHECK(ev("cos(0)") == 1.0);
  CHECK(ev("sin(pi / 2)") == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ev("exp(1)") == doctest::Approx(std::exp(1.0)).epsilon(1e-16));
  CHECK(ev("euler") == std::exp(1.0));
  CHECK(ev("log(exp(2))") == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ev("sqrt(9)") == 3.0);
  CHECK(ev("abs(-4.5)") == 4.5);
  CHECK(ev("min(2, -3)") == -3.0);
  CHECK(ev("max(2, -3)") == 2.0);
}

TEST_CASE("cond evaluates branches lazily") {
  CHECK(ev("cond(1, 10, 20)") == 10.0);
  CHECK(ev("cond(0, 10, 20)") == 20.0);
  // The dead branch would fail if evaluated eagerly.
  CHECK(ev("cond(x0 > 0, log(x0), -1)", {0.0}) == -1.0);
  CHECK(ev("cond(x0 > 0, log(x0), -1)", {1.0}) == 0.0);
}

TEST_CASE("domain violations yield empty, not NaN") {
  CHECK(fails("log(0)"));
  CHECK(fails("log(-1)"));
  CHECK(fails("sqrt(-1)"));
  CHECK(fails("1 / 0"));
  CHECK(fails("(-8) ^ 0.5"));
  CHECK(fails("0 ^ -1"));
  // Overflow to infinity counts as failure.
  CHECK(fails("exp(10000)"));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(Expr::parse(""), cms::Error);
  CHECK_THROWS_AS(Expr::parse("1 +"), cms::Error);
  CHECK_THROWS_AS(Expr::parse("foo(1)"), cms::Error);
  CHECK_THROWS_AS(Expr::parse("min(1)"), cms::Error);   // arity
  CHECK_THROWS_AS(Expr::parse("(1 + 2"), cms::Error);   // unbalanced
  CHECK_THROWS_AS(Expr::parse("1 2"), cms::Error);      // trailing junk
  CHECK_THROWS_AS(Expr::parse("x"), cms::Error);        // index required
  CHECK_THROWS_AS(Expr::parse("1 = 2"), cms::Error);    // no assignment
}

TEST_CASE("text round-trip preserves the source") {
  const std::string src = "sin(x0)^2 / 6 + 17/24";
  Expr e = Expr::parse(src);
  CHECK(e.text() == src);
  // Reparsing the stored text gives identical values.
  Expr e2 = Expr::parse(e.text());
  for (double x : {-2.0, 0.0, 0.7, 31.4}) {
    CHECK(*e.eval(std::vector<double>{x}) == *e2.eval(std::vector<double>{x}));
  }
}

TEST_CASE("probability-style expressions used by fixtures evaluate exactly") {
  // sincos pair sums to 1 up to one rounding step.
  Expr p0 = Expr::parse("sin(x0)^2 / 6 + 17/24");
  Expr p1 = Expr::parse("cos(x0)^2 / 6 + 1/8");
  for (double x : {0.0, 0.5, 2.0, -17.3, 44.0}) {
    double s = *p0.eval(std::vector<double>{x}) + *p1.eval(std::vector<double>{x});
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(*p0.eval(std::vector<double>{0.0}) == 17.0 / 24.0);
  CHECK(*p1.eval(std::vector<double>{0.0}) == 1.0 / 6.0 + 1.0 / 8.0);
}
