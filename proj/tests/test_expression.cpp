#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lowreg/expression.hpp"
#include "lowreg/rng.hpp"

using namespace lowreg;

namespace {

double eval_at(const char* src, double t, Vec x = {}) {
  EvalContext ctx;
  ctx.t = t;
  ctx.x = x;
  return Expr::parse(src).eval(ctx);
}

double eval_x(const char* src, Vec x) { return eval_at(src, 0.0, x); }

}  // namespace

TEST_CASE("grammar examples") {
  CHECK(eval_x("1 + abs(x1)", Vec(-2.0, 0.0)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(eval_x("exp(x1)^2", Vec(0.5, 0.0)) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(Expr::parse("1 + * x1"), ParseError);
  try {
    Expr::parse("1 + * x1");
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);
  }
}

TEST_CASE("precedence and associativity") {
  CHECK(eval_at("2^3^2", 0.0) == doctest::Approx(512.0));          // right-assoc
  CHECK(eval_at("2 + 3*4", 0.0) == doctest::Approx(14.0));
  CHECK(eval_at("(2 + 3)*4", 0.0) == doctest::Approx(20.0));
  CHECK(eval_at("8/4/2", 0.0) == doctest::Approx(1.0));            // left-assoc
  CHECK(eval_at("1 - 2 - 3", 0.0) == doctest::Approx(-4.0));
  // '-' binds tighter than '^': -x1^2 is (-x1)^2
  CHECK(eval_x("-x1^2", Vec(2.0, 0.0)) == doctest::Approx(4.0));
  CHECK(eval_x("-(x1^2)", Vec(2.0, 0.0)) == doctest::Approx(-4.0));
  CHECK(eval_at("min(2, max(3, 1))", 0.0) == doctest::Approx(2.0));
  CHECK(eval_at("  1.5e2   +t ", 2.0) == doctest::Approx(152.0));  // whitespace insignificant
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(eval_at("1/(t - t)", 1.0), EvalError);
  CHECK_THROWS_AS(eval_at("log(t - 2)", 1.0), EvalError);
  CHECK_THROWS_AS(eval_at("sqrt(0 - t)", 1.0), EvalError);
  CHECK_THROWS_AS(Expr::parse("foo(t)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("y + 1"), ParseError);
  CHECK_THROWS_AS(Expr::parse(""), ParseError);
  CHECK_THROWS_AS(eval_x("x3", Vec(1.0, 2.0)), EvalError);  // unbound in 2-D context
}

TEST_CASE("dual evaluation: a.e. derivative semantics") {
  EvalContext ctx;
  ctx.t = 0.5;

  auto d = Expr::parse("t^2 + 3*t").eval_dual(ctx, 0);
  CHECK(*d.deriv == doctest::Approx(2.0 * 0.5 + 3.0).epsilon(1e-14));

  auto chain = Expr::parse("sin(2*t)*exp(t)").eval_dual(ctx, 0);
  double expect = 2.0 * std::cos(1.0) * std::exp(0.5) + std::sin(1.0) * std::exp(0.5);
  CHECK(*chain.deriv == doctest::Approx(expect).epsilon(1e-13));

  // abs kink: undefined exactly at the kink, defined off it
  ctx.t = 0.5;
  CHECK_FALSE(Expr::parse("abs(t - 0.5)").eval_dual(ctx, 0).deriv.has_value());
  ctx.t = 0.75;
  CHECK(*Expr::parse("abs(t - 0.5)").eval_dual(ctx, 0).deriv == doctest::Approx(1.0));
  ctx.t = 0.25;
  CHECK(*Expr::parse("abs(t - 0.5)").eval_dual(ctx, 0).deriv == doctest::Approx(-1.0));

  // min tie
  ctx.t = 1.0;
  CHECK_FALSE(Expr::parse("min(t, 2 - t)").eval_dual(ctx, 0).deriv.has_value());
  ctx.t = 0.5;
  CHECK(*Expr::parse("min(t, 2 - t)").eval_dual(ctx, 0).deriv == doctest::Approx(1.0));

  // fractional power: derivative blows up at 0 -> undefined there
  ctx.t = 0.0;
  CHECK_FALSE(Expr::parse("t^(2/3)").eval_dual(ctx, 0).deriv.has_value());
  ctx.t = 0.125;
  CHECK(*Expr::parse("t^(2/3)").eval_dual(ctx, 0).deriv ==
        doctest::Approx((2.0 / 3.0) * std::pow(0.125, -1.0 / 3.0)).epsilon(1e-12));

  // partials with respect to x-variables
  EvalContext cx;
  cx.x = Vec(1.5, -2.0);
  auto px = Expr::parse("x1*x2 + x2^2").eval_dual(cx, 2);
  CHECK(*px.deriv == doctest::Approx(1.5 + 2.0 * -2.0).epsilon(1e-14));
}

namespace {

Expr random_expr(SplitMix64& rng, int depth) {
  if (depth <= 0) {
    switch (rng.next() % 3) {
      case 0: return Expr::number(std::round(rng.uniform(0.0, 8.0) * 4.0) / 4.0);
      case 1: return Expr::var(0);
      default: return Expr::var(1 + static_cast<int>(rng.next() % 3));
    }
  }
  switch (rng.next() % 10) {
    case 0: return Expr::binary(ExprOp::Add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 1: return Expr::binary(ExprOp::Sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 2: return Expr::binary(ExprOp::Mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 3: return Expr::binary(ExprOp::Div, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 4: return Expr::binary(ExprOp::Pow, random_expr(rng, depth - 1), Expr::number(2));
    case 5: return Expr::unary(ExprOp::Neg, random_expr(rng, depth - 1));
    case 6: return Expr::unary(ExprOp::Abs, random_expr(rng, depth - 1));
    case 7: return Expr::unary(ExprOp::Sin, random_expr(rng, depth - 1));
    case 8: return Expr::binary(ExprOp::Min, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    default:
      return Expr::binary(ExprOp::Max, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("print/parse round trip on 200 generated expressions") {
  SplitMix64 rng(20240817);
  for (int i = 0; i < 200; ++i) {
    Expr e = random_expr(rng, 1 + static_cast<int>(rng.next() % 4));
    std::string s = e.str();
    CAPTURE(s);
    Expr back = Expr::parse(s);
    CHECK(e.identical(back));
    CHECK(back.str() == s);
  }
}
