#include "lowreg/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace lowreg {

namespace {

bool ident_start(char ch) { return std::isalpha(static_cast<unsigned char>(ch)) != 0; }
bool ident_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) != 0; }

struct FnInfo {
  const char* name;
  ExprOp op;
  int arity;
};
constexpr FnInfo kFns[] = {
    {"abs", ExprOp::Abs, 1}, {"sqrt", ExprOp::Sqrt, 1}, {"exp", ExprOp::Exp, 1},
    {"log", ExprOp::Log, 1}, {"sin", ExprOp::Sin, 1},   {"cos", ExprOp::Cos, 1},
    {"min", ExprOp::Min, 2}, {"max", ExprOp::Max, 2},
};

}  // namespace

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  Expr run() {
    if (src_.empty()) throw ParseError("empty expression", 0);
    Expr e;
    e.root_ = parse_expr(e.nodes_);
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool peek_is(char ch) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == ch;
  }
  bool consume(char ch) {
    if (peek_is(ch)) {
      ++pos_;
      return true;
    }
    return false;
  }

  int push(std::vector<ExprNode>& n, ExprNode node) {
    n.push_back(node);
    return static_cast<int>(n.size()) - 1;
  }

  int parse_expr(std::vector<ExprNode>& n) {
    int lhs = parse_term(n);
    for (;;) {
      if (consume('+'))
        lhs = push(n, {ExprOp::Add, lhs, parse_term(n)});
      else if (consume('-'))
        lhs = push(n, {ExprOp::Sub, lhs, parse_term(n)});
      else
        return lhs;
    }
  }

  int parse_term(std::vector<ExprNode>& n) {
    int lhs = parse_factor(n);
    for (;;) {
      if (consume('*'))
        lhs = push(n, {ExprOp::Mul, lhs, parse_factor(n)});
      else if (consume('/'))
        lhs = push(n, {ExprOp::Div, lhs, parse_factor(n)});
      else
        return lhs;
    }
  }

  int parse_factor(std::vector<ExprNode>& n) {
    int base = parse_base(n);
    if (consume('^')) return push(n, {ExprOp::Pow, base, parse_factor(n)});
    return base;
  }

  int parse_base(std::vector<ExprNode>& n) {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    char ch = src_[pos_];
    if (ch == '-') {
      ++pos_;
      return push(n, {ExprOp::Neg, parse_base(n), -1});
    }
    if (ch == '(') {
      ++pos_;
      int e = parse_expr(n);
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return parse_number(n);
    if (ident_start(ch)) return parse_ident(n);
    throw ParseError(std::string("syntax error near '") + ch + "'", pos_);
  }

  int parse_number(std::vector<ExprNode>& n) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to something else
      }
    }
    double v = 0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_)
      throw ParseError("malformed number literal", start);
    ExprNode node{ExprOp::Number, -1, -1};
    node.value = v;
    return push(n, node);
  }

  int parse_ident(std::vector<ExprNode>& n) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);
    if (peek_is('(')) {
      for (const auto& fn : kFns) {
        if (name == fn.name) {
          consume('(');
          int a = parse_expr(n);
          int b = -1;
          if (fn.arity == 2) {
            if (!consume(',')) throw ParseError("expected ',' in call", pos_);
            b = parse_expr(n);
          }
          if (!consume(')')) throw ParseError("expected ')' after call arguments", pos_);
          return push(n, {fn.op, a, b});
        }
      }
      throw ParseError("unknown function '" + std::string(name) + "'", start);
    }
    ExprNode node{ExprOp::Var, -1, -1};
    if (name == "t") {
      node.var = 0;
      return push(n, node);
    }
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9') {
      node.var = name[1] - '0';
      return push(n, node);
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }
};

Expr Expr::parse(std::string_view src) { return ExprParser(src).run(); }

namespace {

double var_value(const EvalContext& ctx, int var) {
  if (var == 0) return ctx.t;
  if (var > ctx.x.dim)
    throw EvalError("variable x" + std::to_string(var) + " is unbound in this context");
  return ctx.x[var - 1];
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("evaluation produced a non-finite value in ") + what);
  return v;
}

}  // namespace

double Expr::eval(const EvalContext& ctx) const {
  if (root_ < 0) throw EvalError("empty expression");
  struct Rec {
    const std::vector<ExprNode>& n;
    const EvalContext& ctx;
    double go(int i) const {
      const ExprNode& e = n[static_cast<std::size_t>(i)];
      switch (e.op) {
        case ExprOp::Number: return e.value;
        case ExprOp::Var: return var_value(ctx, e.var);
        case ExprOp::Neg: return -go(e.a);
        case ExprOp::Add: return go(e.a) + go(e.b);
        case ExprOp::Sub: return go(e.a) - go(e.b);
        case ExprOp::Mul: return go(e.a) * go(e.b);
        case ExprOp::Div: {
          double num = go(e.a), den = go(e.b);
          if (den == 0.0) throw EvalError("division by zero");
          return checked(num / den, "'/'");
        }
        case ExprOp::Pow: return checked(std::pow(go(e.a), go(e.b)), "'^'");
        case ExprOp::Abs: return std::abs(go(e.a));
        case ExprOp::Sqrt: {
          double u = go(e.a);
          if (u < 0) throw EvalError("sqrt of a negative value");
          return std::sqrt(u);
        }
        case ExprOp::Exp: return checked(std::exp(go(e.a)), "exp");
        case ExprOp::Log: {
          double u = go(e.a);
          if (u <= 0) throw EvalError("log of a non-positive value");
          return std::log(u);
        }
        case ExprOp::Sin: return std::sin(go(e.a));
        case ExprOp::Cos: return std::cos(go(e.a));
        case ExprOp::Min: return std::min(go(e.a), go(e.b));
        case ExprOp::Max: return std::max(go(e.a), go(e.b));
      }
      throw EvalError("corrupt expression node");
    }
  };
  return Rec{nodes_, ctx}.go(root_);
}

Expr::Dual Expr::eval_dual(const EvalContext& ctx, int wrt) const {
  if (root_ < 0) throw EvalError("empty expression");
  using D = Dual;
  struct Rec {
    const std::vector<ExprNode>& n;
    const EvalContext& ctx;
    int wrt;

    static std::optional<double> fin(std::optional<double> d) {
      if (d && !std::isfinite(*d)) return std::nullopt;
      return d;
    }
    D go(int i) const {
      const ExprNode& e = n[static_cast<std::size_t>(i)];
      switch (e.op) {
        case ExprOp::Number: return {e.value, 0.0};
        case ExprOp::Var: return {var_value(ctx, e.var), e.var == wrt ? 1.0 : 0.0};
        case ExprOp::Neg: {
          D u = go(e.a);
          return {-u.value, u.deriv ? std::optional<double>(-*u.deriv) : std::nullopt};
        }
        case ExprOp::Add: {
          D u = go(e.a), v = go(e.b);
          return {u.value + v.value,
                  (u.deriv && v.deriv) ? std::optional<double>(*u.deriv + *v.deriv) : std::nullopt};
        }
        case ExprOp::Sub: {
          D u = go(e.a), v = go(e.b);
          return {u.value - v.value,
                  (u.deriv && v.deriv) ? std::optional<double>(*u.deriv - *v.deriv) : std::nullopt};
        }
        case ExprOp::Mul: {
          D u = go(e.a), v = go(e.b);
          std::optional<double> d;
          if (u.deriv && v.deriv) d = *u.deriv * v.value + u.value * *v.deriv;
          return {u.value * v.value, fin(d)};
        }
        case ExprOp::Div: {
          D u = go(e.a), v = go(e.b);
          if (v.value == 0.0) throw EvalError("division by zero");
          std::optional<double> d;
          if (u.deriv && v.deriv)
            d = (*u.deriv * v.value - u.value * *v.deriv) / (v.value * v.value);
          return {checked(u.value / v.value, "'/'"), fin(d)};
        }
        case ExprOp::Pow: {
          D u = go(e.a);
          const ExprNode& eb = n[static_cast<std::size_t>(e.b)];
          if (eb.op == ExprOp::Number) {
            double c = eb.value;
            double val = checked(std::pow(u.value, c), "'^'");
            std::optional<double> d;
            if (u.deriv) d = fin(c * std::pow(u.value, c - 1.0) * *u.deriv);
            return {val, d};
          }
          D w = go(e.b);
          double val = checked(std::pow(u.value, w.value), "'^'");
          std::optional<double> d;
          if (u.deriv && w.deriv && u.value > 0)
            d = fin(val * (*w.deriv * std::log(u.value) + w.value * *u.deriv / u.value));
          return {val, d};
        }
        case ExprOp::Abs: {
          D u = go(e.a);
          std::optional<double> d;
          if (u.deriv && u.value != 0.0) d = (u.value > 0 ? *u.deriv : -*u.deriv);
          return {std::abs(u.value), d};
        }
        case ExprOp::Sqrt: {
          D u = go(e.a);
          if (u.value < 0) throw EvalError("sqrt of a negative value");
          double s = std::sqrt(u.value);
          std::optional<double> d;
          if (u.deriv && u.value > 0) d = fin(*u.deriv / (2.0 * s));
          return {s, d};
        }
        case ExprOp::Exp: {
          D u = go(e.a);
          double v = checked(std::exp(u.value), "exp");
          return {v, u.deriv ? fin(v * *u.deriv) : std::nullopt};
        }
        case ExprOp::Log: {
          D u = go(e.a);
          if (u.value <= 0) throw EvalError("log of a non-positive value");
          return {std::log(u.value), u.deriv ? fin(*u.deriv / u.value) : std::nullopt};
        }
        case ExprOp::Sin: {
          D u = go(e.a);
          return {std::sin(u.value),
                  u.deriv ? std::optional<double>(std::cos(u.value) * *u.deriv) : std::nullopt};
        }
        case ExprOp::Cos: {
          D u = go(e.a);
          return {std::cos(u.value),
                  u.deriv ? std::optional<double>(-std::sin(u.value) * *u.deriv) : std::nullopt};
        }
        case ExprOp::Min: {
          D u = go(e.a), v = go(e.b);
          if (u.value < v.value) return u;
          if (v.value < u.value) return v;
          return {u.value, std::nullopt};
        }
        case ExprOp::Max: {
          D u = go(e.a), v = go(e.b);
          if (u.value > v.value) return u;
          if (v.value > u.value) return v;
          return {u.value, std::nullopt};
        }
      }
      throw EvalError("corrupt expression node");
    }
  };
  return Rec{nodes_, ctx, wrt}.go(root_);
}

namespace {

int precedence(ExprOp op) {
  switch (op) {
    case ExprOp::Add:
    case ExprOp::Sub: return 1;
    case ExprOp::Mul:
    case ExprOp::Div: return 2;
    case ExprOp::Pow: return 3;
    case ExprOp::Neg: return 4;
    default: return 5;  // atoms and calls
  }
}

std::string fmt_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0;
  std::sscanf(buf, "%lf", &back);
  if (back == v) {
    // try shorter forms first for readability
    for (int prec = 1; prec <= 16; ++prec) {
      char b2[40];
      std::snprintf(b2, sizeof(b2), "%.*g", prec, v);
      double r = 0;
      std::sscanf(b2, "%lf", &r);
      if (r == v) return b2;
    }
  }
  return buf;
}

}  // namespace

std::string Expr::str() const {
  if (root_ < 0) return "";
  struct Printer {
    const std::vector<ExprNode>& n;
    std::string go(int i) const {
      const ExprNode& e = n[static_cast<std::size_t>(i)];
      int myp = precedence(e.op);
      auto wrap = [&](int child, bool tight) {
        std::string s = go(child);
        int cp = precedence(n[static_cast<std::size_t>(child)].op);
        bool need = tight ? (cp <= myp) : (cp < myp);
        return need ? "(" + s + ")" : s;
      };
      switch (e.op) {
        case ExprOp::Number: return fmt_number(e.value);
        case ExprOp::Var: return e.var == 0 ? "t" : "x" + std::to_string(e.var);
        case ExprOp::Neg: return "-" + wrap(e.a, false);
        case ExprOp::Add: return wrap(e.a, false) + " + " + wrap(e.b, true);
        case ExprOp::Sub: return wrap(e.a, false) + " - " + wrap(e.b, true);
        case ExprOp::Mul: return wrap(e.a, false) + "*" + wrap(e.b, true);
        case ExprOp::Div: return wrap(e.a, false) + "/" + wrap(e.b, true);
        case ExprOp::Pow: return wrap(e.a, true) + "^" + wrap(e.b, false);
        case ExprOp::Abs: return "abs(" + go(e.a) + ")";
        case ExprOp::Sqrt: return "sqrt(" + go(e.a) + ")";
        case ExprOp::Exp: return "exp(" + go(e.a) + ")";
        case ExprOp::Log: return "log(" + go(e.a) + ")";
        case ExprOp::Sin: return "sin(" + go(e.a) + ")";
        case ExprOp::Cos: return "cos(" + go(e.a) + ")";
        case ExprOp::Min: return "min(" + go(e.a) + ", " + go(e.b) + ")";
        case ExprOp::Max: return "max(" + go(e.a) + ", " + go(e.b) + ")";
      }
      return "?";
    }
  };
  return Printer{nodes_}.go(root_);
}

bool Expr::identical(const Expr& other) const {
  struct Cmp {
    const std::vector<ExprNode>& a;
    const std::vector<ExprNode>& b;
    bool go(int i, int j) const {
      if ((i < 0) != (j < 0)) return false;
      if (i < 0) return true;
      const ExprNode& x = a[static_cast<std::size_t>(i)];
      const ExprNode& y = b[static_cast<std::size_t>(j)];
      if (x.op != y.op) return false;
      if (x.op == ExprOp::Number) return x.value == y.value;
      if (x.op == ExprOp::Var) return x.var == y.var;
      return go(x.a, y.a) && go(x.b, y.b);
    }
  };
  if ((root_ < 0) != (other.root_ < 0)) return false;
  if (root_ < 0) return true;
  return Cmp{nodes_, other.nodes_}.go(root_, other.root_);
}

int Expr::copy_into(std::vector<ExprNode>& out, int node) const {
  const ExprNode& e = nodes_[static_cast<std::size_t>(node)];
  ExprNode copy = e;
  if (e.a >= 0) copy.a = copy_into(out, e.a);
  if (e.b >= 0) copy.b = copy_into(out, e.b);
  out.push_back(copy);
  return static_cast<int>(out.size()) - 1;
}

Expr Expr::number(double v) {
  Expr e;
  ExprNode node{ExprOp::Number, -1, -1};
  node.value = v;
  e.nodes_.push_back(node);
  e.root_ = 0;
  return e;
}

Expr Expr::var(int index) {
  Expr e;
  ExprNode node{ExprOp::Var, -1, -1};
  node.var = index;
  e.nodes_.push_back(node);
  e.root_ = 0;
  return e;
}

Expr Expr::unary(ExprOp op, const Expr& a) {
  Expr e;
  int ia = a.copy_into(e.nodes_, a.root_);
  e.nodes_.push_back({op, ia, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::binary(ExprOp op, const Expr& a, const Expr& b) {
  Expr e;
  int ia = a.copy_into(e.nodes_, a.root_);
  int ib = b.copy_into(e.nodes_, b.root_);
  e.nodes_.push_back({op, ia, ib});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

}  // namespace lowreg
