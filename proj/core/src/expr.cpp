#include "wmean/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "wmean/error.hpp"

namespace wmean {
namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t pos = 0;
  std::string text;
  double number = 0.0;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      std::size_t j = i;
      while (j < src.size() && is_digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && is_digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && is_digit(src[k])) {
          while (k < src.size() && is_digit(src[k])) ++k;
          j = k;
        }
      }
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      auto [ptr, ec] = std::from_chars(src.data() + i, src.data() + j, t.number);
      if (ec != std::errc() || ptr != src.data() + j || !std::isfinite(t.number)) {
        throw ParseError("malformed number '" + t.text + "'", i);
      }
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else {
      switch (c) {
        case '+': t.kind = Tok::Plus; break;
        case '-': t.kind = Tok::Minus; break;
        case '*': t.kind = Tok::Star; break;
        case '/': t.kind = Tok::Slash; break;
        case '^': t.kind = Tok::Caret; break;
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case ',': t.kind = Tok::Comma; break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", i);
      }
      t.text = std::string(1, c);
      ++i;
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.pos = src.size();
  out.push_back(end);
  return out;
}

std::shared_ptr<Expr::Node> make_node(Expr::Op op, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

struct FuncInfo {
  std::string_view name;
  Expr::Func func;
  std::size_t arity;
};

constexpr FuncInfo kFuncs[] = {
    {"log", Expr::Func::Log, 1},   {"exp", Expr::Func::Exp, 1}, {"sin", Expr::Func::Sin, 1},
    {"cos", Expr::Func::Cos, 1},   {"sqrt", Expr::Func::Sqrt, 1}, {"abs", Expr::Func::Abs, 1},
    {"pow", Expr::Func::Pow, 2},
};

const FuncInfo* find_func(std::string_view name) {
  for (const auto& f : kFuncs) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string_view func_name(Expr::Func f) {
  for (const auto& info : kFuncs) {
    if (info.func == f) return info.name;
  }
  return "?";
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::vector<std::string>& vars)
      : toks_(std::move(toks)), vars_(vars) {}

  NodePtr parse_all() {
    auto root = sum();
    expect(Tok::End, "operator or end of input");
    return root;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      throw ParseError(std::string("expected ") + what + ", found " + describe(peek()),
                       peek().pos);
    }
    ++pos_;
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return tok_name(t.kind);
    return "'" + t.text + "'";
  }

  NodePtr sum() {
    auto lhs = product();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const auto op = advance().kind == Tok::Plus ? Expr::Op::Add : Expr::Op::Sub;
      lhs = make_node(op, {lhs, product()});
    }
    return lhs;
  }

  NodePtr product() {
    auto lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const auto op = advance().kind == Tok::Star ? Expr::Op::Mul : Expr::Op::Div;
      lhs = make_node(op, {lhs, unary()});
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().kind == Tok::Minus) {
      advance();
      return make_node(Expr::Op::Neg, {unary()});
    }
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (peek().kind == Tok::Caret) {
      advance();
      return make_node(Expr::Op::Pow, {base, unary()});
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        advance();
        auto n = std::make_shared<Expr::Node>();
        n->op = Expr::Op::Number;
        n->number = t.number;
        return n;
      }
      case Tok::LParen: {
        advance();
        auto inner = sum();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident:
        return identifier();
      default:
        throw ParseError("expected number, name or '(', found " + describe(t), t.pos);
    }
  }

  NodePtr identifier() {
    const Token& t = advance();
    if (peek().kind == Tok::LParen) {
      const FuncInfo* f = find_func(t.text);
      if (f == nullptr) throw ParseError("unknown function '" + t.text + "'", t.pos);
      advance();
      std::vector<NodePtr> args;
      args.push_back(sum());
      while (peek().kind == Tok::Comma) {
        advance();
        args.push_back(sum());
      }
      expect(Tok::RParen, "')' or ','");
      if (args.size() != f->arity) {
        throw ParseError("function '" + t.text + "' takes " + std::to_string(f->arity) +
                             " argument(s), got " + std::to_string(args.size()),
                         t.pos);
      }
      auto n = make_node(Expr::Op::Call, std::move(args));
      n->func = f->func;
      n->name = t.text;
      return n;
    }
    auto n = std::make_shared<Expr::Node>();
    n->name = t.text;
    const auto it = std::find(vars_.begin(), vars_.end(), t.text);
    if (it != vars_.end()) {
      n->op = Expr::Op::Variable;
      n->slot = static_cast<int>(it - vars_.begin());
      return n;
    }
    if (t.text == "pi") {
      n->op = Expr::Op::Constant;
      n->number = std::numbers::pi;
      return n;
    }
    if (t.text == "e") {
      n->op = Expr::Op::Constant;
      n->number = std::numbers::e;
      return n;
    }
    if (find_func(t.text) != nullptr) {
      throw ParseError("function '" + t.text + "' used without arguments", t.pos);
    }
    std::string allowed;
    for (const auto& v : vars_) allowed += (allowed.empty() ? "" : ", ") + v;
    throw ParseError("unknown variable '" + t.text + "' (allowed: " + allowed + ")", t.pos);
  }

  std::vector<Token> toks_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print(const Expr::Node& n) {
  using Op = Expr::Op;
  switch (n.op) {
    case Op::Number: return format_number(n.number);
    case Op::Constant:
    case Op::Variable: return n.name;
    case Op::Neg: return "(-" + print(*n.args[0]) + ")";
    case Op::Call: {
      std::string s = std::string(func_name(n.func)) + "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i > 0) s += ", ";
        s += print(*n.args[i]);
      }
      return s + ")";
    }
    default: break;
  }
  const char* sym = "?";
  switch (n.op) {
    case Op::Add: sym = " + "; break;
    case Op::Sub: sym = " - "; break;
    case Op::Mul: sym = " * "; break;
    case Op::Div: sym = " / "; break;
    case Op::Pow: sym = " ^ "; break;
    default: break;
  }
  return "(" + print(*n.args[0]) + sym + print(*n.args[1]) + ")";
}

[[noreturn]] void fail(const std::string& what, const Expr::Node& n) {
  throw EvalError(what, print(n));
}

double checked_pow(double base, double exponent, const Expr::Node& n) {
  if (base < 0.0 && std::trunc(exponent) != exponent) {
    fail("negative base with non-integer exponent", n);
  }
  if (base == 0.0 && exponent < 0.0) fail("zero raised to a negative power", n);
  return std::pow(base, exponent);
}

double eval_node(const Expr::Node& n, std::span<const double> values) {
  using Op = Expr::Op;
  double v = 0.0;
  switch (n.op) {
    case Op::Number:
    case Op::Constant: return n.number;
    case Op::Variable:
      if (static_cast<std::size_t>(n.slot) >= values.size()) fail("missing binding", n);
      v = values[static_cast<std::size_t>(n.slot)];
      if (!std::isfinite(v)) fail("non-finite binding", n);
      return v;
    case Op::Neg: return -eval_node(*n.args[0], values);
    case Op::Add: v = eval_node(*n.args[0], values) + eval_node(*n.args[1], values); break;
    case Op::Sub: v = eval_node(*n.args[0], values) - eval_node(*n.args[1], values); break;
    case Op::Mul: v = eval_node(*n.args[0], values) * eval_node(*n.args[1], values); break;
    case Op::Div: {
      const double num = eval_node(*n.args[0], values);
      const double den = eval_node(*n.args[1], values);
      if (den == 0.0) fail("division by zero", n);
      v = num / den;
      break;
    }
    case Op::Pow:
      v = checked_pow(eval_node(*n.args[0], values), eval_node(*n.args[1], values), n);
      break;
    case Op::Call: {
      const double a = eval_node(*n.args[0], values);
      switch (n.func) {
        case Expr::Func::Log:
          if (a <= 0.0) fail("log of nonpositive value", n);
          v = std::log(a);
          break;
        case Expr::Func::Exp: v = std::exp(a); break;
        case Expr::Func::Sin: v = std::sin(a); break;
        case Expr::Func::Cos: v = std::cos(a); break;
        case Expr::Func::Sqrt:
          if (a < 0.0) fail("sqrt of negative value", n);
          v = std::sqrt(a);
          break;
        case Expr::Func::Abs: v = std::abs(a); break;
        case Expr::Func::Pow: v = checked_pow(a, eval_node(*n.args[1], values), n); break;
      }
      break;
    }
  }
  if (!std::isfinite(v)) fail("non-finite result", n);
  return v;
}

bool same_tree(const Expr::Node& a, const Expr::Node& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  switch (a.op) {
    case Expr::Op::Number:
      if (a.number != b.number) return false;
      break;
    case Expr::Op::Constant:
    case Expr::Op::Variable:
      if (a.name != b.name) return false;
      break;
    case Expr::Op::Call:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_tree(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

bool uses_name(const Expr::Node& n, std::string_view name) {
  if (n.op == Expr::Op::Variable && n.name == name) return true;
  return std::any_of(n.args.begin(), n.args.end(),
                     [&](const auto& c) { return uses_name(*c, name); });
}

}  // namespace

Expr Expr::parse(std::string_view src, const std::vector<std::string>& allowed_vars) {
  if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError("empty expression", 0);
  }
  Parser p(tokenize(src), allowed_vars);
  return Expr(p.parse_all(), allowed_vars);
}

double Expr::eval(std::span<const double> values) const {
  if (values.size() < vars_.size()) {
    throw EvalError("missing binding for '" + vars_[values.size()] + "'", str());
  }
  return eval_node(*root_, values);
}

double Expr::eval(const Bindings& bindings) const {
  std::vector<double> values(vars_.size(), 0.0);
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto it = bindings.find(vars_[i]);
    if (it == bindings.end()) {
      if (!uses(vars_[i])) continue;
      throw EvalError("missing binding for '" + vars_[i] + "'", str());
    }
    values[i] = it->second;
  }
  return eval_node(*root_, values);
}

std::string Expr::str() const { return print(*root_); }

bool Expr::uses(std::string_view name) const { return uses_name(*root_, name); }

bool operator==(const Expr& a, const Expr& b) { return same_tree(*a.root_, *b.root_); }

}  // namespace wmean
