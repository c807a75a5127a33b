#include "lowreg/metric_field.hpp"

#include <cmath>
#include <fstream>

#include "lowreg/mollify.hpp"
#include "lowreg/parallel.hpp"

namespace lowreg {

std::string to_string(const RegularityTag& r) {
  switch (r.kind) {
    case Regularity::Smooth: return "smooth";
    case Regularity::Lipschitz: return "lipschitz";
    case Regularity::Hoelder: return "hoelder(" + std::to_string(r.alpha) + ")";
    case Regularity::Continuous: return "continuous";
  }
  return "continuous";
}

RegularityTag regularity_from_string(const std::string& s, double alpha) {
  if (s == "smooth") return {Regularity::Smooth, 1.0};
  if (s == "lipschitz") return {Regularity::Lipschitz, 1.0};
  if (s == "hoelder") return {Regularity::Hoelder, alpha};
  if (s == "continuous") return {Regularity::Continuous, 1.0};
  throw ParamError("unknown regularity tag '" + s + "'");
}

void MetricField::require_inside(const Vec& p) const {
  if (!domain.contains_strict(p))
    throw DomainError("point " + lowreg::to_string(p) + " is outside the domain of metric '" +
                      name + "'");
}

Mat MetricField::eval(const Vec& p) const {
  require_inside(p);
  Mat g = matrix_fn(p);
  if (max_asymmetry(g) > 1e-12)
    throw SpdError("metric '" + name + "' is asymmetric at " + lowreg::to_string(p));
  if (!is_spd(g))
    throw SpdError("metric '" + name + "' is not positive definite at " + lowreg::to_string(p));
  return g;
}

double metric_norm(const MetricField& f, const Vec& p, const Vec& v) {
  if (f.omega_fn) {
    f.require_inside(p);
    double w = f.omega_fn(p);
    if (w == 0.0 || !std::isfinite(w))
      throw SpdError("conformal factor of '" + f.name + "' degenerate at " + to_string(p));
    return std::abs(w) * v.norm2();
  }
  Mat g = f.eval(p);
  double q = g.quad(v);
  return q > 0 ? std::sqrt(q) : 0.0;
}

namespace {

// Inclusive grid over `box` with a hair of inset so samples stay strictly
// inside enclosing domains.
struct Grid {
  const BoxDomain& box;
  int res;
  double inset_rel = 1e-9;
  double coord(int axis, int k) const {
    double m = inset_rel * box.extent(axis);
    double lo = box.lo[axis] + m, hi = box.hi[axis] - m;
    return lo + (hi - lo) * k / static_cast<double>(res - 1);
  }
  std::size_t size() const {
    std::size_t n = 1;
    for (int i = 0; i < box.dim; ++i) n *= static_cast<std::size_t>(res);
    return n;
  }
  Vec point(std::size_t flat) const {
    Vec p = Vec::zero(box.dim);
    for (int i = 0; i < box.dim; ++i) {
      p[i] = coord(i, static_cast<int>(flat % static_cast<std::size_t>(res)));
      flat /= static_cast<std::size_t>(res);
    }
    return p;
  }
};

void verify_spd_on_sample(const MetricField& f, int res = 8) {
  Grid g{f.domain, res};
  for (std::size_t i = 0; i < g.size(); ++i) f.eval(g.point(i));  // throws with the point
}

}  // namespace

ComparisonBounds comparison_bounds(const MetricField& f, const BoxDomain& box, int gridRes,
                                   double safety) {
  if (gridRes < 2) throw ParamError("comparison_bounds: gridRes must be >= 2");
  if (!f.domain.contains_box(box) && !(box.dim == f.domain.dim))
    throw DomainError("comparison_bounds: box not contained in the metric domain");
  Grid grid{box, gridRes};
  const std::size_t n = grid.size();
  std::vector<double> lo(n), hi(n);
  par::for_index(n, [&](std::size_t i) {
    EigenRange r = sym_eigen_range(f.eval(grid.point(i)));
    if (!(r.min > 0))
      throw SpdError("metric '" + f.name + "' loses positive definiteness at " +
                     to_string(grid.point(i)));
    lo[i] = std::sqrt(r.min);
    hi[i] = std::sqrt(r.max);
  });
  double l = lo[0], h = hi[0];
  for (std::size_t i = 1; i < n; ++i) {
    l = std::min(l, lo[i]);
    h = std::max(h, hi[i]);
  }
  return {l * (1.0 - safety), h * (1.0 + safety), gridRes};
}

FactorPair pointwise_factor_pair(const MetricField& g, const MetricField& h, const BoxDomain& box,
                                 int gridRes, double safety) {
  if (gridRes < 2) throw ParamError("pointwise_factor_pair: gridRes must be >= 2");
  Grid grid{box, gridRes};
  const std::size_t n = grid.size();
  std::vector<double> lo(n), hi(n);
  par::for_index(n, [&](std::size_t i) {
    Vec q = grid.point(i);
    EigenRange r = generalized_eigen_range(g.eval(q), h.eval(q));
    if (!(r.min > 0))
      throw SpdError("generalized eigenproblem degenerate at " + to_string(q));
    lo[i] = std::sqrt(r.min);
    hi[i] = std::sqrt(r.max);
  });
  double c = lo[0], C = hi[0];
  for (std::size_t i = 1; i < n; ++i) {
    c = std::min(c, lo[i]);
    C = std::max(C, hi[i]);
  }
  return {c * (1.0 - safety), C * (1.0 + safety), gridRes};
}

MetricField make_euclidean(int dim, const BoxDomain& box, std::string name) {
  if (dim != box.dim) throw ParamError("make_euclidean: dim mismatch with domain");
  MetricField f;
  f.domain = box;
  f.regularity = {Regularity::Smooth, 1.0};
  f.name = std::move(name);
  Mat id = Mat::identity(dim);
  f.matrix_fn = [id](const Vec&) { return id; };
  f.omega_fn = [](const Vec&) { return 1.0; };
  f.constant_matrix = id;
  return f;
}

MetricField make_constant(const Mat& g, const BoxDomain& box, std::string name) {
  if (g.dim != box.dim) throw ParamError("make_constant: dim mismatch with domain");
  if (max_asymmetry(g) > 1e-12) throw SpdError("constant metric matrix is asymmetric");
  if (!is_spd(g))
    throw SpdError("constant metric matrix is not positive definite (rejected at " +
                   to_string(box.center()) + ")");
  MetricField f;
  f.domain = box;
  f.regularity = {Regularity::Smooth, 1.0};
  f.name = std::move(name);
  f.matrix_fn = [g](const Vec&) { return g; };
  f.constant_matrix = g;
  return f;
}

MetricField make_conformal(const Expr& omega, const BoxDomain& box, RegularityTag reg,
                           std::string name) {
  MetricField f;
  f.domain = box;
  f.regularity = reg;
  f.name = std::move(name);
  const int dim = box.dim;
  auto om = std::make_shared<Expr>(omega);
  f.omega_fn = [om](const Vec& p) {
    EvalContext ctx;
    ctx.x = p;
    return om->eval(ctx);
  };
  auto wfn = f.omega_fn;
  f.matrix_fn = [wfn, dim](const Vec& p) {
    double w = wfn(p);
    return Mat::identity(dim) * (w * w);
  };
  verify_spd_on_sample(f);
  return f;
}

MetricField make_matrix_field(const std::vector<std::vector<Expr>>& entries, const BoxDomain& box,
                              RegularityTag reg, std::string name) {
  const int dim = box.dim;
  if (static_cast<int>(entries.size()) != dim)
    throw ParamError("make_matrix_field: entries must be a dim x dim array");
  for (const auto& row : entries)
    if (static_cast<int>(row.size()) != dim)
      throw ParamError("make_matrix_field: entries must be a dim x dim array");
  auto exprs = std::make_shared<std::vector<std::vector<Expr>>>(entries);
  MetricField f;
  f.domain = box;
  f.regularity = reg;
  f.name = std::move(name);
  f.matrix_fn = [exprs, dim](const Vec& p) {
    EvalContext ctx;
    ctx.x = p;
    Mat g = Mat::zero(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g.at(i, j) = (*exprs)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(ctx);
    return g;
  };
  verify_spd_on_sample(f);
  return f;
}

MetricField restrict_domain(const MetricField& f, const BoxDomain& box) {
  if (!f.domain.contains_box(box))
    throw DomainError("restrict_domain: box exceeds the field's domain");
  MetricField r = f;
  r.domain = box;
  return r;
}

BoxDomain box_from_json(const nlohmann::json& j) {
  auto lo = j.at("min").get<std::vector<double>>();
  auto hi = j.at("max").get<std::vector<double>>();
  if (lo.size() != hi.size()) throw ParamError("domain: min/max length mismatch");
  return BoxDomain(Vec::from(lo), Vec::from(hi));
}

nlohmann::json box_to_json(const BoxDomain& b) {
  return nlohmann::json{{"min", b.lo.to_vector()}, {"max", b.hi.to_vector()}};
}

MetricField build_metric(const nlohmann::json& spec) {
  std::string kind = spec.at("kind").get<std::string>();
  std::string name = spec.value("name", kind);
  if (kind == "sampled-grid") return sampled_grid_from_json(spec);
  if (kind != "euclidean" && kind != "constant" && kind != "conformal" && kind != "matrix")
    throw ParamError("unknown metric kind '" + kind + "'");

  BoxDomain box = box_from_json(spec.at("domain"));
  int dim = spec.value("dim", box.dim);
  if (dim != box.dim) throw ParamError("metric spec: dim disagrees with domain");

  RegularityTag reg{Regularity::Continuous, 1.0};
  if (spec.contains("regularity"))
    reg = regularity_from_string(spec.at("regularity").get<std::string>(),
                                 spec.value("alpha", 1.0));

  if (kind == "euclidean") return make_euclidean(dim, box, name);
  if (kind == "constant") {
    auto rows = spec.at("entries").get<std::vector<std::vector<double>>>();
    Mat g = Mat::zero(dim);
    if (static_cast<int>(rows.size()) != dim) throw ParamError("constant metric: bad entries shape");
    for (int i = 0; i < dim; ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != dim)
        throw ParamError("constant metric: bad entries shape");
      for (int j = 0; j < dim; ++j) g.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return make_constant(g, box, name);
  }
  if (kind == "conformal") {
    Expr omega = Expr::parse(spec.at("omega").get<std::string>());
    if (!spec.contains("regularity")) reg = {Regularity::Continuous, 1.0};
    return make_conformal(omega, box, reg, name);
  }
  if (kind == "matrix") {
    auto rows = spec.at("entries").get<std::vector<std::vector<std::string>>>();
    std::vector<std::vector<Expr>> entries;
    for (const auto& row : rows) {
      std::vector<Expr> er;
      for (const auto& s : row) er.push_back(Expr::parse(s));
      entries.push_back(std::move(er));
    }
    return make_matrix_field(entries, box, reg, name);
  }
  throw ParamError("unknown metric kind '" + kind + "'");
}

MetricField load_metric_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open metric spec '" + path + "'");
  nlohmann::json j;
  in >> j;
  return build_metric(j);
}

}  // namespace lowreg
