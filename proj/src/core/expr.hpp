#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cms {

// Small arithmetic / predicate expression language.
//
// Grammar (loosest binding first):
//   or:      and ('||' and)*
//   and:     cmp ('&&' cmp)*
//   cmp:     sum (('<'|'<='|'>'|'>='|'=='|'!=') sum)?
//   sum:     term (('+'|'-') term)*
//   term:    unary (('*'|'/') unary)*
//   unary:   ('-'|'!') unary | power
//   power:   primary ('^' unary)?            (right associative)
//   primary: number | ident | ident '(' args ')' | '(' or ')'
//
// Identifiers: variables `x0..x{d-1}` (Euclid coordinates) or `s0..s{L-1}`
// (word symbols, s0 = most recent); constants `pi`, `euler`; functions
// `sin cos exp log sqrt abs min max cond`.  `cond(c, a, b)` evaluates `a`
// when c != 0 and `b` otherwise, lazily, which is how piecewise-defined
// probabilities avoid evaluating a branch outside its domain.  Comparisons
// and boolean operators yield 1.0 / 0.0; `&&` and `||` short-circuit.
//
// Evaluation is a fixed-order tree walk.  Domain violations (log of a
// non-positive value, sqrt of a negative, division by zero, fractional
// powers of negatives, non-finite results) yield an empty optional instead
// of a number.
class Expr {
 public:
  Expr() = default;

  // Throws Error{ParseError} with a position-annotated message.
  static Expr parse(const std::string& text);

  bool empty() const { return nodes_.empty(); }

  std::optional<double> eval(std::span<const double> vars) const;

  // Highest variable index mentioned, or -1 if none.
  int max_var_index() const { return max_var_; }

  // 'x' for Euclid coordinates, 's' for word symbols, 0 if no variables.
  char var_kind() const { return var_kind_; }

  const std::string& text() const { return text_; }

 private:
  enum class Op : unsigned char {
    Const, Var, Neg, Not, Add, Sub, Mul, Div, Pow,
    Lt, Le, Gt, Ge, Eq, Ne, And, Or,
    Sin, Cos, Exp, Log, Sqrt, Abs, Min, Max, Cond,
  };
  struct Node {
    Op op;
    double value = 0.0;  // Const
    int var = -1;        // Var
    int a = -1, b = -1, c = -1;
  };

  std::optional<double> eval_node(int idx, std::span<const double> vars) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  int max_var_ = -1;
  char var_kind_ = 0;
  std::string text_;

  friend class ExprParser;
};

}  // namespace cms
