#include "lowreg/mollify.hpp"

#include <algorithm>
#include <cmath>

#include "lowreg/distance.hpp"
#include "lowreg/parallel.hpp"
#include "lowreg/rng.hpp"

namespace lowreg {

namespace {

int triangle_count(int dim) { return dim * (dim + 1) / 2; }

// upper-triangle component order: (0,0),(0,1),..,(0,n-1),(1,1),..
std::pair<int, int> comp_index(int dim, int c) {
  for (int i = 0, k = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j, ++k)
      if (k == c) return {i, j};
  throw ParamError("bad component index");
}

struct GridView {
  GridSpec g;
  std::size_t size() const {
    std::size_t n = 1;
    for (int i = 0; i < g.dim; ++i) n *= static_cast<std::size_t>(g.res[static_cast<std::size_t>(i)]);
    return n;
  }
  std::size_t flat(const std::array<int, 3>& idx) const {
    std::size_t f = 0, stride = 1;
    for (int i = 0; i < g.dim; ++i) {
      f += static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]) * stride;
      stride *= static_cast<std::size_t>(g.res[static_cast<std::size_t>(i)]);
    }
    return f;
  }
  std::array<int, 3> unflat(std::size_t f) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int i = 0; i < g.dim; ++i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(f % static_cast<std::size_t>(g.res[static_cast<std::size_t>(i)]));
      f /= static_cast<std::size_t>(g.res[static_cast<std::size_t>(i)]);
    }
    return idx;
  }
  Vec point(const std::array<int, 3>& idx) const {
    Vec p = Vec::zero(g.dim);
    for (int i = 0; i < g.dim; ++i)
      p[i] = g.origin[i] + g.spacing[i] * idx[static_cast<std::size_t>(i)];
    return p;
  }
};

// Catmull-Rom weights for fractional position u in [0,1].
std::array<double, 4> cubic_weights(double u) {
  double u2 = u * u, u3 = u2 * u;
  return {-0.5 * u3 + u2 - 0.5 * u, 1.5 * u3 - 2.5 * u2 + 1.0, -1.5 * u3 + 2.0 * u2 + 0.5 * u,
          0.5 * u3 - 0.5 * u2};
}

/// Tensor-product cubic interpolation over smoothed samples. Valid stencils
/// are guaranteed by the effective-domain margin.
struct GridInterp {
  GridView view;
  std::vector<std::vector<double>> comps;  // triangle order

  Mat eval(const Vec& p) const {
    const int dim = view.g.dim;
    std::array<int, 3> base{0, 0, 0};
    std::array<std::array<double, 4>, 3> w{};
    for (int i = 0; i < dim; ++i) {
      double s = (p[i] - view.g.origin[i]) / view.g.spacing[i];
      int cell = static_cast<int>(std::floor(s));
      cell = std::clamp(cell, 1, view.g.res[static_cast<std::size_t>(i)] - 3);
      base[static_cast<std::size_t>(i)] = cell;
      w[static_cast<std::size_t>(i)] = cubic_weights(s - cell);
    }
    const int nc = triangle_count(dim);
    Mat m = Mat::zero(dim);
    for (int c = 0; c < nc; ++c) {
      double acc = 0;
      if (dim == 1) {
        for (int a = -1; a <= 2; ++a)
          acc += w[0][static_cast<std::size_t>(a + 1)] *
                 comps[static_cast<std::size_t>(c)][view.flat({base[0] + a, 0, 0})];
      } else if (dim == 2) {
        for (int b = -1; b <= 2; ++b) {
          double row = 0;
          for (int a = -1; a <= 2; ++a)
            row += w[0][static_cast<std::size_t>(a + 1)] *
                   comps[static_cast<std::size_t>(c)][view.flat({base[0] + a, base[1] + b, 0})];
          acc += w[1][static_cast<std::size_t>(b + 1)] * row;
        }
      } else {
        for (int cz = -1; cz <= 2; ++cz) {
          double plane = 0;
          for (int b = -1; b <= 2; ++b) {
            double row = 0;
            for (int a = -1; a <= 2; ++a)
              row += w[0][static_cast<std::size_t>(a + 1)] *
                     comps[static_cast<std::size_t>(c)][view.flat({base[0] + a, base[1] + b, base[2] + cz})];
            plane += w[1][static_cast<std::size_t>(b + 1)] * row;
          }
          acc += w[2][static_cast<std::size_t>(cz + 1)] * plane;
        }
      }
      auto [i, j] = comp_index(dim, c);
      m.at(i, j) = acc;
      m.at(j, i) = acc;
    }
    return m;
  }
};

struct Stencil {
  std::vector<std::array<int, 3>> offsets;
  std::vector<double> weights;  // normalized to sum exactly 1
};

Stencil make_stencil(const GridSpec& g, double eps) {
  Stencil st;
  std::array<int, 3> radius{0, 0, 0};
  for (int i = 0; i < g.dim; ++i)
    radius[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(eps / g.spacing[i]));
  auto rho = [&](double r2) { // (1 - r^2)^4 profile on r <= 1
    double u = 1.0 - r2;
    if (u <= 0) return 0.0;
    double u2 = u * u;
    return u2 * u2;
  };
  int rz = g.dim >= 3 ? radius[2] : 0;
  int ry = g.dim >= 2 ? radius[1] : 0;
  double total = 0;
  for (int oz = -rz; oz <= rz; ++oz)
    for (int oy = -ry; oy <= ry; ++oy)
      for (int ox = -radius[0]; ox <= radius[0]; ++ox) {
        double r2 = 0;
        double dx = ox * g.spacing[0] / eps;
        r2 += dx * dx;
        if (g.dim >= 2) {
          double dy = oy * g.spacing[1] / eps;
          r2 += dy * dy;
        }
        if (g.dim >= 3) {
          double dz = oz * g.spacing[2] / eps;
          r2 += dz * dz;
        }
        double w = rho(r2);
        if (w > 0) {
          st.offsets.push_back({ox, oy, oz});
          st.weights.push_back(w);
          total += w;
        }
      }
  for (double& w : st.weights) w /= total;  // preserves constants exactly
  return st;
}

}  // namespace

MollifiedMetric mollify_with_width(const MetricField& base, double eps, int gridRes) {
  if (gridRes < 8) throw ParamError("mollify: gridRes must be >= 8");
  if (!(eps > 0)) throw ParamError("mollify: kernel width must be positive");
  const int dim = base.domain.dim;
  GridSpec g;
  g.dim = dim;
  g.origin = Vec::zero(dim);
  g.spacing = Vec::zero(dim);
  for (int i = 0; i < dim; ++i) {
    double inset = 1e-9 * base.domain.extent(i);
    g.res[static_cast<std::size_t>(i)] = gridRes;
    g.origin[i] = base.domain.lo[i] + inset;
    g.spacing[i] = (base.domain.extent(i) - 2 * inset) / (gridRes - 1);
  }
  GridView view{g};
  const int nc = triangle_count(dim);
  const std::size_t n = view.size();

  // raw samples
  std::vector<std::vector<double>> raw(static_cast<std::size_t>(nc), std::vector<double>(n));
  par::for_index(n, [&](std::size_t f) {
    Mat m = base.eval(view.point(view.unflat(f)));
    for (int c = 0; c < nc; ++c) {
      auto [i, j] = comp_index(dim, c);
      raw[static_cast<std::size_t>(c)][f] = 0.5 * (m.at(i, j) + m.at(j, i));
    }
  });

  Stencil st = make_stencil(g, eps);
  std::array<int, 3> radius{0, 0, 0};
  for (const auto& o : st.offsets)
    for (int i = 0; i < 3; ++i)
      radius[static_cast<std::size_t>(i)] =
          std::max(radius[static_cast<std::size_t>(i)], std::abs(o[static_cast<std::size_t>(i)]));

  // convolve where the whole stencil fits; elsewhere copy raw samples (those
  // nodes are outside the effective domain and never interpolated from)
  std::vector<std::vector<double>> smooth = raw;
  par::for_index(n, [&](std::size_t f) {
    auto idx = view.unflat(f);
    for (int i = 0; i < dim; ++i) {
      int k = idx[static_cast<std::size_t>(i)];
      if (k < radius[static_cast<std::size_t>(i)] ||
          k >= g.res[static_cast<std::size_t>(i)] - radius[static_cast<std::size_t>(i)])
        return;
    }
    for (int c = 0; c < nc; ++c) {
      double acc = 0;
      for (std::size_t s = 0; s < st.offsets.size(); ++s) {
        auto o = st.offsets[s];
        acc += st.weights[s] *
               raw[static_cast<std::size_t>(c)][view.flat({idx[0] + o[0], idx[1] + o[1], idx[2] + o[2]})];
      }
      smooth[static_cast<std::size_t>(c)][f] = acc;
    }
  });

  // effective domain: convolution margin plus a 2-node interpolation margin
  Vec lo = Vec::zero(dim), hi = Vec::zero(dim);
  for (int i = 0; i < dim; ++i) {
    int m = radius[static_cast<std::size_t>(i)] + 2;
    if (2 * m + 4 >= g.res[static_cast<std::size_t>(i)])
      throw ResolutionError("mollify: kernel width " + std::to_string(eps) +
                            " leaves no effective domain at gridRes " + std::to_string(gridRes));
    lo[i] = g.origin[i] + m * g.spacing[i];
    hi[i] = g.origin[i] + (g.res[static_cast<std::size_t>(i)] - 1 - m) * g.spacing[i];
  }

  MollifiedMetric mol;
  mol.kernelWidth = eps;
  mol.grid = g;
  mol.effectiveDomain = BoxDomain(lo, hi);
  mol.baseName = base.name;
  mol.components = smooth;

  auto interp = std::make_shared<GridInterp>(GridInterp{view, std::move(smooth)});
  MetricField f;
  f.domain = mol.effectiveDomain;
  f.regularity = {Regularity::Smooth, 1.0};
  f.name = base.name + "_mollified";
  f.matrix_fn = [interp](const Vec& p) { return interp->eval(p); };
  if (base.is_conformal() && dim >= 1) {
    // the smoothed field stays conformal: all diagonal components are equal
    // and off-diagonals vanish identically on the grid
    bool conformal = true;
    for (int c = 0; c < nc && conformal; ++c) {
      auto [i, j] = comp_index(dim, c);
      if (i != j)
        for (double v : interp->comps[static_cast<std::size_t>(c)])
          if (v != 0.0) {
            conformal = false;
            break;
          }
    }
    if (conformal)
      f.omega_fn = [interp](const Vec& p) { return std::sqrt(interp->eval(p).at(0, 0)); };
  }
  mol.field = std::move(f);
  return mol;
}

RatioRange norm_ratio_range(const MetricField& base, const MetricField& smoothed,
                            const BoxDomain& box, std::uint64_t seed, int samples) {
  std::vector<Vec> qs(static_cast<std::size_t>(samples)), vs(static_cast<std::size_t>(samples));
  SplitMix64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    qs[static_cast<std::size_t>(k)] = rng.point_in(box, 1e-6);
    vs[static_cast<std::size_t>(k)] = rng.unit_vector(box.dim);
  }
  std::vector<double> ratio(static_cast<std::size_t>(samples));
  par::for_index(static_cast<std::size_t>(samples), [&](std::size_t k) {
    double a = metric_norm(smoothed, qs[k], vs[k]);
    double b = metric_norm(base, qs[k], vs[k]);
    ratio[k] = a / b;
  });
  double lo = ratio[0], hi = ratio[0];
  for (double r : ratio) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

MollifiedMetric mollify_metric(const MetricField& base, int targetIndex, int gridRes,
                               std::uint64_t seed, int samples) {
  if (targetIndex < 2) throw ParamError("mollify: target index must be >= 2");
  const double bandLo = (targetIndex - 1.0) / targetIndex;
  const double bandHi = (targetIndex + 1.0) / targetIndex;

  double hmin = base.domain.min_extent() / (gridRes - 1);
  double epsLo = 1.5 * hmin;                       // barely wider than one cell
  double epsHi = 0.18 * base.domain.min_extent();  // keeps a usable effective domain

  auto passes = [&](double eps) -> bool {
    MollifiedMetric mol = mollify_with_width(base, eps, gridRes);
    RatioRange r = norm_ratio_range(base, mol.field, mol.effectiveDomain, seed, samples);
    return r.lo >= bandLo && r.hi <= bandHi;  // strict band; callers test with slack
  };

  if (!passes(epsLo))
    throw ResolutionError("mollify: no kernel width achieves the (n-1)/n sandwich at n=" +
                          std::to_string(targetIndex) + "; increase gridRes (" +
                          std::to_string(gridRes) + ")");
  double lo = epsLo;
  if (passes(epsHi)) {
    lo = epsHi;
  } else {
    double hi = epsHi;
    for (int it = 0; it < 25; ++it) {
      double mid = 0.5 * (lo + hi);
      (passes(mid) ? lo : hi) = mid;
    }
  }
  MollifiedMetric mol = mollify_with_width(base, lo, gridRes);
  mol.targetIndex = targetIndex;
  mol.field.name = base.name + "_g" + std::to_string(targetIndex);
  return mol;
}

MollifyDistanceReport mollified_distance_check(const MetricField& base, const MollifiedMetric& mol,
                                               const std::vector<std::pair<Vec, Vec>>& pairs,
                                               const DistanceConfig& cfg) {
  MollifyDistanceReport rep;
  const int n = mol.targetIndex;
  rep.bandLo = (n - 1.0) / n;
  rep.bandHi = (n + 1.0) / n;
  MetricField baseR = restrict_domain(base, mol.effectiveDomain);
  rep.pass = true;
  rep.rows.resize(pairs.size());
  par::for_index(pairs.size(), [&](std::size_t i) {
    const auto& [p, q] = pairs[i];
    DistanceResult a = distance(baseR, p, q, cfg);
    DistanceResult b = distance(mol.field, p, q, cfg);
    MollifyDistanceReport::Row row;
    row.p = p;
    row.q = q;
    row.d = a.value;
    row.dn = b.value;
    row.ratio = b.value / a.value;
    double rel = a.errorEstimate / std::max(a.value, 1e-12) +
                 b.errorEstimate / std::max(b.value, 1e-12);
    row.slack = 3.0 * rel;
    row.pass = row.ratio >= rep.bandLo - row.slack && row.ratio <= rep.bandHi + row.slack;
    rep.rows[i] = row;
  });
  for (const auto& row : rep.rows) rep.pass = rep.pass && row.pass;
  return rep;
}

nlohmann::json sampled_grid_to_json(const MollifiedMetric& mol) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : mol.components) comps.push_back(c);
  nlohmann::json res = nlohmann::json::array();
  std::vector<double> origin, spacing;
  for (int i = 0; i < mol.grid.dim; ++i) {
    res.push_back(mol.grid.res[static_cast<std::size_t>(i)]);
    origin.push_back(mol.grid.origin[i]);
    spacing.push_back(mol.grid.spacing[i]);
  }
  return nlohmann::json{{"kind", "sampled-grid"},
                        {"name", mol.field.name},
                        {"dim", mol.grid.dim},
                        {"domain", box_to_json(mol.effectiveDomain)},
                        {"kernelWidth", mol.kernelWidth},
                        {"targetIndex", mol.targetIndex},
                        {"base", mol.baseName},
                        {"grid", nlohmann::json{{"res", res}, {"origin", origin}, {"spacing", spacing},
                                                {"components", comps}}}};
}

MetricField sampled_grid_from_json(const nlohmann::json& spec) {
  GridSpec g;
  g.dim = spec.at("dim").get<int>();
  const auto& grid = spec.at("grid");
  auto res = grid.at("res").get<std::vector<int>>();
  auto origin = grid.at("origin").get<std::vector<double>>();
  auto spacing = grid.at("spacing").get<std::vector<double>>();
  g.origin = Vec::from(origin);
  g.spacing = Vec::from(spacing);
  for (int i = 0; i < g.dim; ++i) g.res[static_cast<std::size_t>(i)] = res[static_cast<std::size_t>(i)];
  GridView view{g};
  std::vector<std::vector<double>> comps;
  for (const auto& c : grid.at("components")) comps.push_back(c.get<std::vector<double>>());
  if (static_cast<int>(comps.size()) != triangle_count(g.dim))
    throw ParamError("sampled-grid: wrong component count");
  for (const auto& c : comps)
    if (c.size() != view.size()) throw ParamError("sampled-grid: component size mismatch");

  auto interp = std::make_shared<GridInterp>(GridInterp{view, std::move(comps)});
  MetricField f;
  f.domain = box_from_json(spec.at("domain"));
  f.regularity = {Regularity::Smooth, 1.0};
  f.name = spec.value("name", std::string("sampled-grid"));
  f.matrix_fn = [interp](const Vec& p) { return interp->eval(p); };
  return f;
}

}  // namespace lowreg
