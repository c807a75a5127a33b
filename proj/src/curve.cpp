#include "lowreg/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lowreg {

namespace {

std::vector<double> normalize_knots(std::vector<double> ks) {
  ks.push_back(0.0);
  ks.push_back(1.0);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-13; }),
           ks.end());
  if (ks.front() < -1e-12 || ks.back() > 1.0 + 1e-12)
    throw ParamError("curve knots must lie in [0,1]");
  ks.front() = 0.0;
  ks.back() = 1.0;
  return ks;
}

void check_param(double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw ParamError("curve parameter " + std::to_string(t) + " outside [0,1]");
}

}  // namespace

Curve::Curve(std::shared_ptr<const Impl> impl, std::vector<double> knots)
    : impl_(std::move(impl)), knots_(normalize_knots(std::move(knots))) {}

Vec Curve::eval(double t) const {
  check_param(t);
  return impl_->eval(t);
}

std::optional<Vec> Curve::derivative(double t) const {
  check_param(t);
  return impl_->derivative(t);
}

double cantor_value(double t, int depth) {
  if (depth < 1) throw ParamError("cantor_value: depth must be >= 1");
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double val = 0.0, half = 0.5;
  for (int k = 0; k < depth; ++k) {
    t *= 3.0;
    int d = static_cast<int>(t);
    t -= d;
    if (d == 1) return val + half;
    if (d == 2) val += half;
    half *= 0.5;
    if (t == 0.0) break;
  }
  return val;
}

namespace {

struct ExprCurveImpl : Curve::Impl {
  std::vector<Expr> comps;
  std::optional<std::vector<Expr>> derivs;

  Vec eval(double t) const override {
    EvalContext ctx;
    ctx.t = t;
    Vec p = Vec::zero(static_cast<int>(comps.size()));
    for (std::size_t i = 0; i < comps.size(); ++i) p[static_cast<int>(i)] = comps[i].eval(ctx);
    return p;
  }
  std::optional<Vec> derivative(double t) const override {
    EvalContext ctx;
    ctx.t = t;
    Vec d = Vec::zero(static_cast<int>(comps.size()));
    if (derivs) {
      for (std::size_t i = 0; i < derivs->size(); ++i) {
        double v = (*derivs)[i].eval(ctx);
        if (!std::isfinite(v)) return std::nullopt;
        d[static_cast<int>(i)] = v;
      }
      return d;
    }
    for (std::size_t i = 0; i < comps.size(); ++i) {
      auto dual = comps[i].eval_dual(ctx, 0);
      if (!dual.deriv) return std::nullopt;
      d[static_cast<int>(i)] = *dual.deriv;
    }
    return d;
  }
  int dim() const override { return static_cast<int>(comps.size()); }
  std::string kind() const override { return "piecewise-expr"; }
};

struct PolylineImpl : Curve::Impl {
  std::vector<Vec> verts;

  // uniform parameter: vertex i sits at i/(V-1)
  Vec eval(double t) const override {
    const int segs = static_cast<int>(verts.size()) - 1;
    double s = t * segs;
    int i = std::min(static_cast<int>(s), segs - 1);
    double u = s - i;
    return verts[static_cast<std::size_t>(i)] * (1.0 - u) + verts[static_cast<std::size_t>(i + 1)] * u;
  }
  std::optional<Vec> derivative(double t) const override {
    const int segs = static_cast<int>(verts.size()) - 1;
    double s = t * segs;
    int nearest = static_cast<int>(std::lround(s));
    if (nearest >= 1 && nearest <= segs - 1 && std::abs(s - nearest) < 1e-12 * segs)
      return std::nullopt;  // interior vertex
    int i = std::min(static_cast<int>(s), segs - 1);
    return (verts[static_cast<std::size_t>(i + 1)] - verts[static_cast<std::size_t>(i)]) * static_cast<double>(segs);
  }
  int dim() const override { return verts.front().dim; }
  std::string kind() const override { return "polyline"; }
};

struct CantorGraphImpl : Curve::Impl {
  int scan_depth;

  Vec eval(double t) const override { return Vec(t, cantor_value(t, scan_depth)); }
  std::optional<Vec> derivative(double t) const override {
    // (1,0) in the interior of a removed interval, i.e. once the ternary scan
    // meets a digit 1 with a nondegenerate remainder; undefined otherwise.
    if (t <= 0.0 || t >= 1.0) return std::nullopt;
    double s = t;
    for (int k = 0; k < scan_depth; ++k) {
      s *= 3.0;
      int d = static_cast<int>(s);
      s -= d;
      if (d == 1) {
        if (s > 1e-12 && s < 1.0 - 1e-12) return Vec(1.0, 0.0);
        return std::nullopt;  // boundary of a removed interval
      }
      if (s == 0.0) break;
    }
    return std::nullopt;  // in (or unresolvably near) the Cantor set
  }
  int dim() const override { return 2; }
  std::string kind() const override { return "cantor-graph"; }
};

struct RestrictImpl : Curve::Impl {
  Curve base;
  double a, b;

  Vec eval(double t) const override { return base.eval(a + t * (b - a)); }
  std::optional<Vec> derivative(double t) const override {
    auto d = base.derivative(a + t * (b - a));
    if (!d) return std::nullopt;
    return *d * (b - a);
  }
  int dim() const override { return base.dim(); }
  std::string kind() const override { return "composite"; }
};

struct ConcatImpl : Curve::Impl {
  Curve c1, c2;

  Vec eval(double t) const override {
    return t <= 0.5 ? c1.eval(std::min(1.0, 2.0 * t)) : c2.eval(std::min(1.0, 2.0 * t - 1.0));
  }
  std::optional<Vec> derivative(double t) const override {
    if (std::abs(t - 0.5) < 1e-12) return std::nullopt;  // junction knot
    auto d = t < 0.5 ? c1.derivative(2.0 * t) : c2.derivative(2.0 * t - 1.0);
    if (!d) return std::nullopt;
    return *d * 2.0;
  }
  int dim() const override { return c1.dim(); }
  std::string kind() const override { return "composite"; }
};

struct ReparamImpl : Curve::Impl {
  Curve base;
  Expr phi;

  Vec eval(double t) const override {
    EvalContext ctx;
    ctx.t = t;
    double u = std::clamp(phi.eval(ctx), 0.0, 1.0);
    return base.eval(u);
  }
  std::optional<Vec> derivative(double t) const override {
    EvalContext ctx;
    ctx.t = t;
    auto dual = phi.eval_dual(ctx, 0);
    if (!dual.deriv) return std::nullopt;
    double u = std::clamp(dual.value, 0.0, 1.0);
    auto d = base.derivative(u);
    if (!d) return std::nullopt;
    return *d * *dual.deriv;
  }
  int dim() const override { return base.dim(); }
  std::string kind() const override { return "composite"; }
};

void validate_finite(const Curve& c) {
  for (int k = 0; k <= 128; ++k) {
    Vec p = c.eval(k / 128.0);
    for (int i = 0; i < p.dim; ++i)
      if (!std::isfinite(p[i]))
        throw ParamError("curve evaluates to a non-finite point at t=" + std::to_string(k / 128.0));
  }
}

}  // namespace

Curve make_expr_curve(std::vector<Expr> components, std::optional<std::vector<Expr>> derivatives,
                      std::vector<double> extra_knots) {
  if (components.empty() || components.size() > kMaxDim)
    throw ParamError("expression curve needs 1..3 components");
  if (derivatives && derivatives->size() != components.size())
    throw ParamError("expression curve: derivative count mismatch");
  auto impl = std::make_shared<ExprCurveImpl>();
  impl->comps = std::move(components);
  impl->derivs = std::move(derivatives);
  Curve c(impl, std::move(extra_knots));
  validate_finite(c);
  return c;
}

Curve make_segment(const Vec& a, const Vec& b) { return make_polyline({a, b}); }

Curve make_polyline(const std::vector<Vec>& vertices) {
  if (vertices.size() < 2) throw ParamError("polyline needs at least 2 vertices");
  const int dim = vertices.front().dim;
  for (const auto& v : vertices)
    if (v.dim != dim) throw ParamError("polyline vertices have mixed dimensions");
  auto impl = std::make_shared<PolylineImpl>();
  impl->verts = vertices;
  std::vector<double> knots;
  const int segs = static_cast<int>(vertices.size()) - 1;
  for (int i = 0; i <= segs; ++i) knots.push_back(i / static_cast<double>(segs));
  return Curve(impl, std::move(knots));
}

namespace {
void ternary_endpoints(double a, double b, int level, int max_level, std::vector<double>& out) {
  if (level > max_level) return;
  double third = (b - a) / 3.0;
  out.push_back(a + third);
  out.push_back(a + 2.0 * third);
  ternary_endpoints(a, a + third, level + 1, max_level, out);
  ternary_endpoints(a + 2.0 * third, b, level + 1, max_level, out);
}
}  // namespace

Curve make_cantor_graph(int scan_depth, int knot_level) {
  if (scan_depth < 1) throw ParamError("cantor graph: scan depth must be >= 1");
  auto impl = std::make_shared<CantorGraphImpl>();
  impl->scan_depth = scan_depth;
  // Knots at removed-interval endpoints down to knot_level: the breakpoints
  // where smoothness fails, truncated like the digit scan itself. They anchor
  // induced-length refinement and quadrature splitting.
  std::vector<double> knots;
  if (knot_level > 0) ternary_endpoints(0.0, 1.0, 1, knot_level, knots);
  return Curve(impl, std::move(knots));
}

Curve restrict(const Curve& c, double a, double b) {
  if (!(0.0 <= a && a < b && b <= 1.0)) throw ParamError("restrict: need 0 <= a < b <= 1");
  auto impl = std::make_shared<RestrictImpl>();
  impl->base = c;
  impl->a = a;
  impl->b = b;
  std::vector<double> knots;
  for (double k : c.knots())
    if (k > a + 1e-13 && k < b - 1e-13) knots.push_back((k - a) / (b - a));
  return Curve(impl, std::move(knots));
}

Curve concat(const Curve& c1, const Curve& c2) {
  if (c1.dim() != c2.dim()) throw JoinError("concat: dimension mismatch");
  Vec e1 = c1.eval(1.0), s2 = c2.eval(0.0);
  if ((e1 - s2).norm2() > 1e-9)
    throw JoinError("concat: endpoint mismatch, " + to_string(e1) + " vs " + to_string(s2));
  auto impl = std::make_shared<ConcatImpl>();
  impl->c1 = c1;
  impl->c2 = c2;
  std::vector<double> knots{0.5};
  for (double k : c1.knots()) knots.push_back(0.5 * k);
  for (double k : c2.knots()) knots.push_back(0.5 + 0.5 * k);
  return Curve(impl, std::move(knots));
}

Curve reparametrize(const Curve& c, const Expr& phi) {
  EvalContext ctx;
  ctx.t = 0.0;
  double p0 = phi.eval(ctx);
  ctx.t = 1.0;
  double p1 = phi.eval(ctx);
  if (std::abs(p0) > 1e-9 || std::abs(p1 - 1.0) > 1e-9)
    throw ParamError("reparametrize: phi must map 0->0 and 1->1");
  double prev = 0.0;
  for (int k = 1; k <= 256; ++k) {
    ctx.t = k / 256.0;
    double v = phi.eval(ctx);
    if (v < prev - 1e-12) throw ParamError("reparametrize: phi is not weakly monotone");
    prev = std::max(prev, v);
  }
  auto impl = std::make_shared<ReparamImpl>();
  impl->base = c;
  impl->phi = phi;
  // preimages of the base knots (phi is monotone, bisect)
  std::vector<double> knots;
  for (double k : c.knots()) {
    if (k <= 0.0 || k >= 1.0) continue;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      ctx.t = mid;
      (phi.eval(ctx) < k ? lo : hi) = mid;
    }
    knots.push_back(0.5 * (lo + hi));
  }
  return Curve(impl, std::move(knots));
}

Curve curve_from_json(const nlohmann::json& spec) {
  std::string kind = spec.at("kind").get<std::string>();
  if (kind == "expr") {
    std::vector<Expr> comps;
    for (const auto& s : spec.at("components")) comps.push_back(Expr::parse(s.get<std::string>()));
    std::optional<std::vector<Expr>> derivs;
    if (spec.contains("derivatives")) {
      std::vector<Expr> ds;
      for (const auto& s : spec.at("derivatives")) ds.push_back(Expr::parse(s.get<std::string>()));
      derivs = std::move(ds);
    }
    std::vector<double> knots;
    if (spec.contains("knots")) knots = spec.at("knots").get<std::vector<double>>();
    return make_expr_curve(std::move(comps), std::move(derivs), std::move(knots));
  }
  if (kind == "polyline") {
    std::vector<Vec> verts;
    for (const auto& v : spec.at("vertices")) verts.push_back(Vec::from(v.get<std::vector<double>>()));
    return make_polyline(verts);
  }
  if (kind == "cantor-graph")
    return make_cantor_graph(spec.value("depth", 60), spec.value("knotLevel", 6));
  throw ParamError("unknown curve kind '" + kind + "'");
}

Curve load_curve_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open curve spec '" + path + "'");
  nlohmann::json j;
  in >> j;
  return curve_from_json(j);
}

nlohmann::json curve_to_polyline_json(const Curve& c, int vertices) {
  nlohmann::json verts = nlohmann::json::array();
  for (int k = 0; k < vertices; ++k) {
    Vec p = c.eval(k / static_cast<double>(vertices - 1));
    verts.push_back(p.to_vector());
  }
  return nlohmann::json{{"kind", "polyline"}, {"vertices", verts}};
}

double ac_defined_fraction(const Curve& c, int nodes) {
  int defined = 0;
  for (int k = 0; k < nodes; ++k) {
    double t = (k + 0.5) / nodes;
    if (c.derivative(t)) ++defined;
  }
  return defined / static_cast<double>(nodes);
}

}  // namespace lowreg
