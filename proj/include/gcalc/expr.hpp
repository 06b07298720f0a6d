#pragma once

/*
 * Expression language for derivands.
 *
 *   expr    ::= term { ("+" | "-") term }
 *   term    ::= unary { ("*" | "/") unary }
 *   unary   ::= "-" unary | power
 *   power   ::= primary [ "^" unary ]            (right associative)
 *   primary ::= number | "x" | "pi" | "e" | "i"
 *             | func "(" expr ")" | "(" expr ")"
 *   func    ::= sin | cos | tan | asin | acos | atan | exp | ln | sqrt | abs
 *   number  ::= digits [ "." digits ] [ ("e"|"E") ["+"|"-"] digits ]
 *             | "." digits [ exponent ]
 *
 * "-x^2" is -(x^2); "2^-1" is allowed because the exponent is a unary.
 * Evaluation is over the complex numbers with principal branches.
 */

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "gcalc/errors.hpp"
#include "gcalc/types.hpp"

namespace gcalc {


// ---------------------------------------------------------------------------
// Tokens

enum class TokenKind { Number, Identifier, Operator, Paren, Comma };

struct Token {
  TokenKind kind;
  std::string lexeme;
  std::size_t position;

  bool operator==(const Token&) const = default;
};

namespace detail {

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Length of a number literal starting at `pos`, or throws at the first
// malformed character.
inline std::size_t scan_number(std::string_view s, std::size_t pos) {
  std::size_t i = pos;
  const auto digits = [&] {
    const std::size_t start = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    return i - start;
  };
  const std::size_t int_digits = digits();
  if (i < s.size() && s[i] == '.') {
    const std::size_t dot = i++;
    if (digits() == 0) throw ParseError("malformed number literal", int_digits ? dot : pos);
  }
  // An exponent is only taken when digits follow; otherwise 'e' is the constant.
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::size_t j = i + 1;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
    if (j < s.size() && is_digit(s[j])) {
      i = j;
      digits();
    }
  }
  if (i < s.size() && s[i] == '.') throw ParseError("malformed number literal", i);
  return i - pos;
}

}  // namespace detail

inline std::vector<Token> tokenize(std::string_view input) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < input.size()) {
    const char c = input[i];
    if (detail::is_space(c)) {
      ++i;
    } else if (detail::is_digit(c) || c == '.') {
      const std::size_t len = detail::scan_number(input, i);
      out.push_back({TokenKind::Number, std::string(input.substr(i, len)), i});
      i += len;
    } else if (detail::is_alpha(c)) {
      std::size_t j = i;
      while (j < input.size() && (detail::is_alpha(input[j]) || detail::is_digit(input[j]))) ++j;
      out.push_back({TokenKind::Identifier, std::string(input.substr(i, j - i)), i});
      i = j;
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      out.push_back({TokenKind::Operator, std::string(1, c), i++});
    } else if (c == '(' || c == ')') {
      out.push_back({TokenKind::Paren, std::string(1, c), i++});
    } else if (c == ',') {
      out.push_back({TokenKind::Comma, ",", i++});
    } else {
      throw ParseError(std::string("invalid character '") + c + "'", i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tree

enum class Constant { Pi, E, I };
enum class UnaryOp { Neg };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Tan, Asin, Acos, Atan, Exp, Ln, Sqrt, Abs };

inline constexpr std::array<std::pair<std::string_view, Func>, 10> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"tan", Func::Tan},
    {"asin", Func::Asin},
    {"acos", Func::Acos},
    {"atan", Func::Atan},
    {"exp", Func::Exp},
    {"ln", Func::Ln},
    {"sqrt", Func::Sqrt},
    {"abs", Func::Abs},
}};

inline std::optional<Func> lookup_function(std::string_view name) {
  for (const auto& [n, f] : kFunctions)
    if (n == name) return f;
  return std::nullopt;
}

inline std::string_view function_name(Func f) {
  for (const auto& [n, g] : kFunctions)
    if (g == f) return n;
  return "?";
}

struct ExprLiteral;
struct ExprConstantRef;
struct ExprVariable;
struct ExprUnary;
struct ExprBinary;
struct ExprCall;

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  using Literal = ExprLiteral;
  using ConstantRef = ExprConstantRef;
  using Variable = ExprVariable;
  using Unary = ExprUnary;
  using Binary = ExprBinary;
  using Call = ExprCall;
  using Node = std::variant<Literal, ConstantRef, Variable, Unary, Binary, Call>;

  static Expr literal(double v);
  static Expr constant(Constant c);
  static Expr variable();
  static Expr neg(Expr e);
  static Expr binary(BinaryOp op, Expr l, Expr r);
  static Expr call(Func f, Expr e);

  const Node& node() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  template <class T>
  static Expr make(T&& n);
  std::shared_ptr<const Node> node_;
};

struct ExprLiteral { double value; };
struct ExprConstantRef { Constant which; };
struct ExprVariable {};
struct ExprUnary { UnaryOp op; Expr child; };
struct ExprBinary { BinaryOp op; Expr left; Expr right; };
struct ExprCall { Func func; Expr child; };

template <class T>
Expr Expr::make(T&& n) {
  return Expr(std::make_shared<const Node>(std::forward<T>(n)));
}
inline Expr Expr::literal(double v) { return make(Literal{v}); }
inline Expr Expr::constant(Constant c) { return make(ConstantRef{c}); }
inline Expr Expr::variable() { return make(Variable{}); }
inline Expr Expr::neg(Expr e) { return make(Unary{UnaryOp::Neg, std::move(e)}); }
inline Expr Expr::binary(BinaryOp op, Expr l, Expr r) { return make(Binary{op, std::move(l), std::move(r)}); }
inline Expr Expr::call(Func f, Expr e) { return make(Call{f, std::move(e)}); }
inline const Expr::Node& Expr::node() const { return *node_; }

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.index() != nb.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(nb);
        if constexpr (std::is_same_v<T, Expr::Literal>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Expr::ConstantRef>) {
          return x.which == y.which;
        } else if constexpr (std::is_same_v<T, Expr::Variable>) {
          return true;
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          return x.op == y.op && x.child == y.child;
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          return x.op == y.op && x.left == y.left && x.right == y.right;
        } else {
          return x.func == y.func && x.child == y.child;
        }
      },
      na);
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, std::size_t end_offset)
      : tokens_(tokens), end_offset_(end_offset) {}

  Expr parse_all() {
    Expr e = expression();
    if (pos_ < tokens_.size()) {
      const Token& t = tokens_[pos_];
      if (t.lexeme == ")") throw ParseError("unbalanced ')'", t.position);
      throw ParseError("trailing input '" + t.lexeme + "'", t.position);
    }
    return e;
  }

 private:
  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }
  bool peek_is(std::string_view lexeme) const {
    const Token* t = peek();
    return t && (t->kind == TokenKind::Operator || t->kind == TokenKind::Paren) && t->lexeme == lexeme;
  }
  std::size_t here() const { return pos_ < tokens_.size() ? tokens_[pos_].position : end_offset_; }

  [[noreturn]] void unexpected() const {
    if (const Token* t = peek()) throw ParseError("unexpected token '" + t->lexeme + "'", t->position);
    throw ParseError("unexpected end of input", end_offset_);
  }

  Expr expression() {
    Expr lhs = term();
    while (peek_is("+") || peek_is("-")) {
      const BinaryOp op = tokens_[pos_++].lexeme == "+" ? BinaryOp::Add : BinaryOp::Sub;
      lhs = Expr::binary(op, std::move(lhs), term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (peek_is("*") || peek_is("/")) {
      const BinaryOp op = tokens_[pos_++].lexeme == "*" ? BinaryOp::Mul : BinaryOp::Div;
      lhs = Expr::binary(op, std::move(lhs), unary());
    }
    return lhs;
  }

  Expr unary() {
    if (peek_is("-")) {
      ++pos_;
      return Expr::neg(unary());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (peek_is("^")) {
      ++pos_;
      return Expr::binary(BinaryOp::Pow, std::move(base), unary());
    }
    return base;
  }

  void expect_close(std::size_t open_pos) {
    if (!peek()) throw ParseError("unbalanced '('", open_pos);
    if (!peek_is(")")) unexpected();
    ++pos_;
  }

  Expr primary() {
    const Token* t = peek();
    if (!t) unexpected();
    switch (t->kind) {
      case TokenKind::Number: {
        ++pos_;
        double v = 0.0;
        const char* first = t->lexeme.data();
        const char* last = first + t->lexeme.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) throw ParseError("malformed number literal", t->position);
        return Expr::literal(v);
      }
      case TokenKind::Identifier: {
        ++pos_;
        const std::string& id = t->lexeme;
        if (id == "x") return Expr::variable();
        if (id == "pi") return Expr::constant(Constant::Pi);
        if (id == "e") return Expr::constant(Constant::E);
        if (id == "i") return Expr::constant(Constant::I);
        const auto f = lookup_function(id);
        if (!f) throw ParseError("unknown identifier '" + id + "'", t->position);
        if (!peek_is("(")) unexpected();
        const std::size_t open = tokens_[pos_++].position;
        Expr arg = expression();
        expect_close(open);
        return Expr::call(*f, std::move(arg));
      }
      case TokenKind::Paren:
        if (t->lexeme == "(") {
          const std::size_t open = t->position;
          ++pos_;
          Expr inner = expression();
          expect_close(open);
          return inner;
        }
        throw ParseError("unbalanced ')'", t->position);
      default:
        unexpected();
    }
  }

  const std::vector<Token>& tokens_;
  std::size_t end_offset_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// `end_offset` is reported for errors at end of input.
inline Expr parse(const std::vector<Token>& tokens, std::size_t end_offset) {
  if (tokens.empty()) throw ParseError("empty expression", end_offset);
  return detail::Parser(tokens, end_offset).parse_all();
}

inline Expr parse(const std::vector<Token>& tokens) {
  const std::size_t end = tokens.empty() ? 0 : tokens.back().position + tokens.back().lexeme.size();
  return parse(tokens, end);
}

inline Expr parse(std::string_view text) { return parse(tokenize(text), text.size()); }

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {


// Drop a negative zero imaginary part so complex branch cuts pick the
// principal (upper) side for real arguments.
inline cplx canon(cplx z) { return is_real(z) ? cplx(z.real(), 0.0) : z; }

inline cplx ipow(cplx base, long n) {
  cplx result(1.0, 0.0);
  bool invert = n < 0;
  unsigned long k = static_cast<unsigned long>(invert ? -n : n);
  while (k) {
    if (k & 1u) result *= base;
    base *= base;
    k >>= 1u;
  }
  return invert ? cplx(1.0, 0.0) / result : result;
}

inline cplx eval_pow(cplx b, cplx p, double x) {
  if (b == cplx(0.0, 0.0)) {
    if (is_real(p) && p.real() > 0.0) return {0.0, 0.0};
    if (p == cplx(0.0, 0.0)) return {1.0, 0.0};
    throw EvalError("division by zero in power", x);
  }
  if (is_real(p) && std::trunc(p.real()) == p.real() && std::abs(p.real()) <= 64.0) {
    const long n = static_cast<long>(p.real());
    if (is_real(b)) return {std::pow(b.real(), static_cast<double>(n)), 0.0};
    return ipow(b, n);
  }
  if (is_real(b) && is_real(p) && b.real() > 0.0) return {std::pow(b.real(), p.real()), 0.0};
  return std::pow(canon(b), canon(p));
}

inline cplx eval_call(Func f, cplx z, double x) {
  const bool real = is_real(z);
  const double r = z.real();
  z = canon(z);
  switch (f) {
    case Func::Sin: return real ? cplx(std::sin(r), 0.0) : std::sin(z);
    case Func::Cos: return real ? cplx(std::cos(r), 0.0) : std::cos(z);
    case Func::Tan: return real ? cplx(std::tan(r), 0.0) : std::tan(z);
    case Func::Asin: return real && std::abs(r) <= 1.0 ? cplx(std::asin(r), 0.0) : std::asin(z);
    case Func::Acos: return real && std::abs(r) <= 1.0 ? cplx(std::acos(r), 0.0) : std::acos(z);
    case Func::Atan: return real ? cplx(std::atan(r), 0.0) : std::atan(z);
    case Func::Exp: return real ? cplx(std::exp(r), 0.0) : std::exp(z);
    case Func::Ln:
      if (z == cplx(0.0, 0.0)) throw EvalError("logarithm of zero", x);
      return real && r > 0.0 ? cplx(std::log(r), 0.0) : std::log(z);
    case Func::Sqrt: return real && r >= 0.0 ? cplx(std::sqrt(r), 0.0) : std::sqrt(z);
    case Func::Abs: return {std::abs(z), 0.0};
  }
  return {};
}

inline cplx eval_node(const Expr& e, cplx x, double xr) {
  return std::visit(
      [&](const auto& n) -> cplx {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Literal>) {
          return {n.value, 0.0};
        } else if constexpr (std::is_same_v<T, Expr::ConstantRef>) {
          switch (n.which) {
            case Constant::Pi: return {std::numbers::pi, 0.0};
            case Constant::E: return {std::numbers::e, 0.0};
            case Constant::I: return {0.0, 1.0};
          }
          return {};
        } else if constexpr (std::is_same_v<T, Expr::Variable>) {
          return x;
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          return -eval_node(n.child, x, xr);
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          const cplx a = eval_node(n.left, x, xr);
          const cplx b = eval_node(n.right, x, xr);
          switch (n.op) {
            case BinaryOp::Add: return a + b;
            case BinaryOp::Sub: return a - b;
            case BinaryOp::Mul:
              return is_real(a) && is_real(b) ? cplx(a.real() * b.real(), 0.0) : a * b;
            case BinaryOp::Div:
              if (b == cplx(0.0, 0.0)) throw EvalError("division by zero", xr);
              return is_real(a) && is_real(b) ? cplx(a.real() / b.real(), 0.0) : a / b;
            case BinaryOp::Pow: return eval_pow(a, b, xr);
          }
          return {};
        } else {
          return eval_call(n.func, eval_node(n.child, x, xr), xr);
        }
      },
      e.node());
}

}  // namespace detail

inline cplx eval(const Expr& e, cplx x) { return detail::eval_node(e, x, x.real()); }
inline cplx eval(const Expr& e, double x) { return detail::eval_node(e, cplx(x, 0.0), x); }

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::string format_literal(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void render(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Literal>) {
          out += format_literal(n.value);
        } else if constexpr (std::is_same_v<T, Expr::ConstantRef>) {
          out += n.which == Constant::Pi ? "pi" : n.which == Constant::E ? "e" : "i";
        } else if constexpr (std::is_same_v<T, Expr::Variable>) {
          out += 'x';
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          out += "(-";
          render(n.child, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          static constexpr char ops[] = {'+', '-', '*', '/', '^'};
          out += '(';
          render(n.left, out);
          out += ops[static_cast<int>(n.op)];
          render(n.right, out);
          out += ')';
        } else {
          out += function_name(n.func);
          out += '(';
          render(n.child, out);
          out += ')';
        }
      },
      e.node());
}

}  // namespace detail

/// Fully parenthesized rendering; parse(to_text(e)) == e for trees whose
/// literals are finite and non-negative (the only literals parse produces).
inline std::string to_text(const Expr& e) {
  std::string out;
  detail::render(e, out);
  return out;
}

}  // namespace gcalc
