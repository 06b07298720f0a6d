#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "gcalc/expr.hpp"
#include "oracles.hpp"

using namespace gcalc;
using Catch::Matchers::WithinAbs;

TEST_CASE("tokenize splits a polynomial into one token per symbol") {
  const auto t = tokenize("x^2+2*x+3");
  REQUIRE(t.size() == 9);
  std::string joined;
  for (const auto& tok : t) joined += tok.lexeme + " ";
  CHECK(joined == "x ^ 2 + 2 * x + 3 ");
  CHECK(t.back().kind == TokenKind::Number);
  CHECK(t.back().lexeme == "3");
  CHECK(t.back().position == 8);
}

TEST_CASE("tokenize of empty input is empty") { CHECK(tokenize("").empty()); }

TEST_CASE("malformed literal reports its offset") {
  try {
    tokenize("2..5");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 1);
  }
  CHECK_THROWS_AS(tokenize("x $ 2"), ParseError);
}

TEST_CASE("token positions increase and lexemes cover the input") {
  const std::string in = " sin( 2.5e-3*x )^ 2 ";
  const auto t = tokenize(in);
  std::string joined, stripped;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k) CHECK(t[k].position > t[k - 1].position);
    joined += t[k].lexeme;
  }
  for (char c : in)
    if (c != ' ') stripped += c;
  CHECK(joined == stripped);
}

TEST_CASE("exponent binds tighter than multiplication") {
  const Expr e = parse("2*x^3");
  const Expr want = Expr::binary(BinaryOp::Mul, Expr::literal(2),
                                 Expr::binary(BinaryOp::Pow, Expr::variable(), Expr::literal(3)));
  CHECK(e == want);
}

TEST_CASE("unary minus binds looser than power") {
  CHECK(parse("-x^2") == Expr::neg(Expr::binary(BinaryOp::Pow, Expr::variable(), Expr::literal(2))));
}

TEST_CASE("power is right associative") {
  CHECK(parse("x^2^3") ==
        Expr::binary(BinaryOp::Pow, Expr::variable(),
                     Expr::binary(BinaryOp::Pow, Expr::literal(2), Expr::literal(3))));
}

TEST_CASE("parse errors") {
  try {
    parse("2*+x");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse("(x+1"), ParseError);
  CHECK_THROWS_AS(parse("x+1)"), ParseError);
  CHECK_THROWS_AS(parse("x 2"), ParseError);
  CHECK_THROWS_AS(parse("foo(x)"), ParseError);
  CHECK_THROWS_AS(parse("X"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("sin x"), ParseError);
}

TEST_CASE("evaluation examples") {
  CHECK(eval(parse("x^2+2*x+3"), 1.0) == cplx(6.0, 0.0));
  CHECK_THAT(std::abs(eval(parse("sin(2*pi*(x^3/3+x^2+x))"), 0.0)), WithinAbs(0.0, 1e-300));
  const cplx l = eval(parse("ln(x)"), -1.0);
  CHECK_THAT(l.real(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(l.imag(), WithinAbs(std::numbers::pi, 1e-15));
  CHECK(eval(parse("2e3"), 0.0) == cplx(2000.0, 0.0));
  CHECK_THAT(eval(parse("2*e"), 0.0).real(), WithinAbs(2.0 * std::numbers::e, 1e-15));
}

TEST_CASE("real inputs stay exactly real along real paths") {
  for (const char* s : {"sin(x)*exp(x)-sqrt(x+2)", "x^3/7", "abs(x-5)", "atan(x)+cos(x)^2"}) {
    const cplx v = eval(parse(s), 0.7);
    CHECK(v.imag() == 0.0);
    CHECK_FALSE(std::signbit(v.imag()));
  }
}

TEST_CASE("principal branches") {
  const cplx s = eval(parse("sqrt(x)"), -4.0);
  CHECK_THAT(s.real(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(s.imag(), WithinAbs(2.0, 1e-15));
  const cplx p = eval(parse("x^0.5"), -4.0);
  CHECK_THAT(p.imag(), WithinAbs(2.0, 1e-14));
  const cplx a = eval(parse("asin(x)"), 2.0);
  CHECK_THAT(std::sin(a).real(), WithinAbs(2.0, 1e-12));
  const cplx k = eval(parse("2*e^(-i*(x^4/4+x^2))"), 1.0);
  CHECK_THAT(std::abs(k - 2.0 * std::exp(cplx(0.0, -1.25))), WithinAbs(0.0, 1e-14));
}

TEST_CASE("evaluation errors carry x") {
  try {
    eval(parse("1/(x-2)"), 2.0);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.x() == 2.0);
  }
  CHECK_THROWS_AS(eval(parse("ln(x)"), 0.0), EvalError);
  CHECK_THROWS_AS(eval(parse("x^-1"), 0.0), EvalError);
}

TEST_CASE("to_text renders fully parenthesized") {
  CHECK(to_text(Expr::binary(BinaryOp::Mul, Expr::literal(2), Expr::variable())) == "(2*x)");
  CHECK(to_text(Expr::neg(Expr::variable())) == "(-x)");
  const Expr e = parse("x+1*2");
  CHECK(parse(to_text(e)) == e);
}

TEST_CASE("evaluation is pure") {
  const Expr e = parse("sin(x)^2 + ln(x - 3) * i");
  for (double x : {-1.0, 0.5, 4.25}) {
    const cplx a = eval(e, x), b = eval(e, x);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  }
}

namespace {

Expr random_tree(int depth) {
  const int pick = depth == 0 ? oracle::uniform_int(0, 2) : oracle::uniform_int(0, 6);
  switch (pick) {
    case 0: return Expr::literal(std::round(oracle::uniform(0.0, 100.0) * 8.0) / 8.0);
    case 1: return Expr::variable();
    case 2: return Expr::constant(static_cast<Constant>(oracle::uniform_int(0, 2)));
    case 3: return Expr::neg(random_tree(depth - 1));
    case 4: return Expr::call(static_cast<Func>(oracle::uniform_int(0, 9)), random_tree(depth - 1));
    default:
      return Expr::binary(static_cast<BinaryOp>(oracle::uniform_int(0, 4)), random_tree(depth - 1),
                          random_tree(depth - 1));
  }
}

std::string random_int_expr(int depth) {
  if (depth == 0 || oracle::uniform_int(0, 3) == 0) return std::to_string(oracle::uniform_int(0, 9));
  const int pick = oracle::uniform_int(0, 6);
  if (pick == 0) return "-" + random_int_expr(depth - 1);
  if (pick == 1) return "(" + random_int_expr(depth - 1) + ")";
  static const char ops[] = {'+', '-', '*', '/', '^'};
  const char op = ops[oracle::uniform_int(0, 4)];
  if (op == '^') return random_int_expr(0) + "^" + std::to_string(oracle::uniform_int(0, 3));
  return random_int_expr(depth - 1) + op + random_int_expr(depth - 1);
}

}  // namespace

TEST_CASE("round trip parse(to_text(n)) == n on random trees") {
  for (int k = 0; k < 300; ++k) {
    const Expr e = random_tree(oracle::uniform_int(0, 5));
    INFO(to_text(e));
    CHECK(parse(to_text(e)) == e);
  }
}

TEST_CASE("precedence agrees with a reference evaluator") {
  int compared = 0;
  for (int k = 0; compared < 200 && k < 2000; ++k) {
    const std::string s = random_int_expr(4);
    const cplx want = oracle::RefEval(s).run();
    if (!std::isfinite(want.real()) || !std::isfinite(want.imag()) || std::abs(want) > 1e12) continue;
    cplx got;
    try {
      got = eval(parse(s), 0.0);
    } catch (const EvalError&) {
      continue;
    }
    INFO(s);
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
    ++compared;
  }
  CHECK(compared >= 100);
}
