#include "core/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

#include "core/error.hpp"

namespace cms {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEuler = 2.71828182845904523536;

bool is_integer_valued(double x) { return std::isfinite(x) && x == std::floor(x); }

}  // namespace

class ExprParser {
 public:
  ExprParser(const std::string& text, Expr& out) : text_(text), out_(out) {}

  void run() {
    out_.text_ = text_;
    pos_ = 0;
    out_.root_ = parse_or();
    skip_ws();
    if (pos_ != text_.size()) error("unexpected trailing input");
    if (out_.root_ < 0) error("empty expression");
  }

 private:
  [[noreturn]] void error(const std::string& what) {
    fail(ErrorCode::ParseError,
         "expression parse error at position " + std::to_string(pos_) + ": " + what +
             " in \"" + text_ + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(const char* tok) {
    skip_ws();
    size_t n = std::char_traits<char>::length(tok);
    if (text_.compare(pos_, n, tok) == 0) {
      // Avoid eating "<" out of "<=", "=" out of "==", etc.
      if (n == 1 && (tok[0] == '<' || tok[0] == '>') && pos_ + 1 < text_.size() &&
          text_[pos_ + 1] == '=')
        return false;
      pos_ += n;
      return true;
    }
    return false;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  int add(Expr::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }
  int add_binary(Expr::Op op, int a, int b) {
    Expr::Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    return add(n);
  }

  int parse_or() {
    int lhs = parse_and();
    while (eat("||")) lhs = add_binary(Expr::Op::Or, lhs, parse_and());
    return lhs;
  }

  int parse_and() {
    int lhs = parse_cmp();
    while (eat("&&")) lhs = add_binary(Expr::Op::And, lhs, parse_cmp());
    return lhs;
  }

  int parse_cmp() {
    int lhs = parse_sum();
    if (eat("<=")) return add_binary(Expr::Op::Le, lhs, parse_sum());
    if (eat(">=")) return add_binary(Expr::Op::Ge, lhs, parse_sum());
    if (eat("==")) return add_binary(Expr::Op::Eq, lhs, parse_sum());
    if (eat("!=")) return add_binary(Expr::Op::Ne, lhs, parse_sum());
    if (eat("<")) return add_binary(Expr::Op::Lt, lhs, parse_sum());
    if (eat(">")) return add_binary(Expr::Op::Gt, lhs, parse_sum());
    return lhs;
  }

  int parse_sum() {
    int lhs = parse_term();
    for (;;) {
      if (eat("+")) lhs = add_binary(Expr::Op::Add, lhs, parse_term());
      else if (eat("-")) lhs = add_binary(Expr::Op::Sub, lhs, parse_term());
      else return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (eat("*")) lhs = add_binary(Expr::Op::Mul, lhs, parse_unary());
      else if (eat("/")) lhs = add_binary(Expr::Op::Div, lhs, parse_unary());
      else return lhs;
    }
  }

  int parse_unary() {
    skip_ws();
    if (eat("-")) {
      Expr::Node n;
      n.op = Expr::Op::Neg;
      n.a = parse_unary();
      return add(n);
    }
    if (pos_ < text_.size() && text_[pos_] == '!' &&
        (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '=')) {
      ++pos_;
      Expr::Node n;
      n.op = Expr::Op::Not;
      n.a = parse_unary();
      return add(n);
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    skip_ws();
    if (eat("^")) return add_binary(Expr::Op::Pow, base, parse_unary());
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) error("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (c == '(') {
      ++pos_;
      int inner = parse_or();
      skip_ws();
      if (!eat(")")) error("expected ')'");
      return inner;
    }
    error(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) error("malformed number");
    pos_ += static_cast<size_t>(end - begin);
    Expr::Node n;
    n.op = Expr::Op::Const;
    n.value = v;
    return add(n);
  }

  int parse_ident() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);

    if (name == "pi") {
      Expr::Node n;
      n.op = Expr::Op::Const;
      n.value = kPi;
      return add(n);
    }
    if (name == "euler") {
      Expr::Node n;
      n.op = Expr::Op::Const;
      n.value = kEuler;
      return add(n);
    }

    if ((name[0] == 'x' || name[0] == 's') && name.size() > 1 &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
      bool all_digits = true;
      for (size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) all_digits = false;
      if (all_digits) {
        int idx = std::atoi(name.c_str() + 1);
        if (out_.var_kind_ != 0 && out_.var_kind_ != name[0])
          error("expression mixes x- and s-variables");
        out_.var_kind_ = name[0];
        out_.max_var_ = std::max(out_.max_var_, idx);
        Expr::Node n;
        n.op = Expr::Op::Var;
        n.var = idx;
        return add(n);
      }
    }

    static const std::map<std::string, std::pair<Expr::Op, int>> kFns = {
        {"sin", {Expr::Op::Sin, 1}},   {"cos", {Expr::Op::Cos, 1}},
        {"exp", {Expr::Op::Exp, 1}},   {"log", {Expr::Op::Log, 1}},
        {"sqrt", {Expr::Op::Sqrt, 1}}, {"abs", {Expr::Op::Abs, 1}},
        {"min", {Expr::Op::Min, 2}},   {"max", {Expr::Op::Max, 2}},
        {"cond", {Expr::Op::Cond, 3}},
    };
    auto it = kFns.find(name);
    if (it == kFns.end()) error("unknown identifier '" + name + "'");
    if (!eat("(")) error("expected '(' after function '" + name + "'");
    Expr::Node n;
    n.op = it->second.first;
    n.a = parse_or();
    int arity = it->second.second;
    if (arity >= 2) {
      if (!eat(",")) error("expected ',' in call to '" + name + "'");
      n.b = parse_or();
    }
    if (arity >= 3) {
      if (!eat(",")) error("expected ',' in call to '" + name + "'");
      n.c = parse_or();
    }
    if (peek(',')) error("too many arguments to '" + name + "'");
    if (!eat(")")) error("expected ')' closing call to '" + name + "'");
    return add(n);
  }

  const std::string& text_;
  Expr& out_;
  size_t pos_ = 0;
};

Expr Expr::parse(const std::string& text) {
  Expr e;
  ExprParser(text, e).run();
  return e;
}

std::optional<double> Expr::eval(std::span<const double> vars) const {
  if (root_ < 0) return std::nullopt;
  return eval_node(root_, vars);
}

std::optional<double> Expr::eval_node(int idx, std::span<const double> vars) const {
  const Node& n = nodes_[static_cast<size_t>(idx)];
  auto finite = [](double v) -> std::optional<double> {
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  };
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Var:
      if (n.var < 0 || static_cast<size_t>(n.var) >= vars.size()) return std::nullopt;
      return vars[static_cast<size_t>(n.var)];
    case Op::Neg: {
      auto a = eval_node(n.a, vars);
      if (!a) return std::nullopt;
      return -*a;
    }
    case Op::Not: {
      auto a = eval_node(n.a, vars);
      if (!a) return std::nullopt;
      return *a == 0.0 ? 1.0 : 0.0;
    }
    case Op::And: {
      auto a = eval_node(n.a, vars);
      if (!a) return std::nullopt;
      if (*a == 0.0) return 0.0;
      auto b = eval_node(n.b, vars);
      if (!b) return std::nullopt;
      return *b != 0.0 ? 1.0 : 0.0;
    }
    case Op::Or: {
      auto a = eval_node(n.a, vars);
      if (!a) return std::nullopt;
      if (*a != 0.0) return 1.0;
      auto b = eval_node(n.b, vars);
      if (!b) return std::nullopt;
      return *b != 0.0 ? 1.0 : 0.0;
    }
    case Op::Cond: {
      auto c = eval_node(n.a, vars);
      if (!c) return std::nullopt;
      return eval_node(*c != 0.0 ? n.b : n.c, vars);
    }
    default:
      break;
  }

  auto a = eval_node(n.a, vars);
  if (!a) return std::nullopt;
  std::optional<double> b;
  if (n.b >= 0) {
    b = eval_node(n.b, vars);
    if (!b) return std::nullopt;
  }

  switch (n.op) {
    case Op::Add: return finite(*a + *b);
    case Op::Sub: return finite(*a - *b);
    case Op::Mul: return finite(*a * *b);
    case Op::Div:
      if (*b == 0.0) return std::nullopt;
      return finite(*a / *b);
    case Op::Pow:
      if (*a == 0.0 && *b < 0.0) return std::nullopt;
      if (*a < 0.0 && !is_integer_valued(*b)) return std::nullopt;
      return finite(std::pow(*a, *b));
    case Op::Lt: return *a < *b ? 1.0 : 0.0;
    case Op::Le: return *a <= *b ? 1.0 : 0.0;
    case Op::Gt: return *a > *b ? 1.0 : 0.0;
    case Op::Ge: return *a >= *b ? 1.0 : 0.0;
    case Op::Eq: return *a == *b ? 1.0 : 0.0;
    case Op::Ne: return *a != *b ? 1.0 : 0.0;
    case Op::Sin: return finite(std::sin(*a));
    case Op::Cos: return finite(std::cos(*a));
    case Op::Exp: return finite(std::exp(*a));
    case Op::Log:
      if (*a <= 0.0) return std::nullopt;
      return finite(std::log(*a));
    case Op::Sqrt:
      if (*a < 0.0) return std::nullopt;
      return finite(std::sqrt(*a));
    case Op::Abs: return finite(std::fabs(*a));
    case Op::Min: return finite(std::fmin(*a, *b));
    case Op::Max: return finite(std::fmax(*a, *b));
    default: return std::nullopt;
  }
}

}  // namespace cms
