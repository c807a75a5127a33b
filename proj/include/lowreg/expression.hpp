#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lowreg/types.hpp"

namespace lowreg {

// Scalar expression language used by metric and curve specs.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' factor)?            ('^' right-associative)
//   base   := number | ident | ident '(' args ')' | '(' expr ')' | '-' base
//
// Variables: t and x1..x9. Calls: abs sqrt exp log sin cos (unary),
// min max (binary). Note that '-' binds tighter than '^', so -x1^2
// parses as (-x1)^2.

enum class ExprOp : std::uint8_t {
  Number,
  Var,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Abs,
  Sqrt,
  Exp,
  Log,
  Sin,
  Cos,
  Min,
  Max,
};

struct ExprNode {
  ExprOp op;
  int a = -1, b = -1;
  double value = 0.0;  // Number payload
  int var = 0;         // Var payload: 0 = t, k = xk
};

struct EvalContext {
  double t = 0.0;
  Vec x;  // x1..xn; unreferenced when evaluating pure functions of t
};

class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view src);

  double eval(const EvalContext& ctx) const;

  /// Value plus the a.e. derivative with respect to one variable
  /// (wrt = 0 for t, k for xk). The derivative is absent exactly where the
  /// expression has no classical derivative: abs at zero, min/max ties,
  /// sqrt at zero, fractional powers at the axis.
  struct Dual {
    double value = 0;
    std::optional<double> deriv;
  };
  Dual eval_dual(const EvalContext& ctx, int wrt) const;

  /// Minimal-parentheses form; reparsing yields an identical AST.
  std::string str() const;

  bool identical(const Expr& other) const;
  bool empty() const { return root_ < 0; }

  // programmatic builders (suite fixtures construct ASTs directly)
  static Expr number(double v);
  static Expr var(int index);
  static Expr unary(ExprOp op, const Expr& a);
  static Expr binary(ExprOp op, const Expr& a, const Expr& b);

 private:
  std::vector<ExprNode> nodes_;
  int root_ = -1;

  int copy_into(std::vector<ExprNode>& out, int node) const;
  friend class ExprParser;
};

}  // namespace lowreg
