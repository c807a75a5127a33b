#include "lowreg/distance.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "lowreg/length.hpp"
#include "lowreg/parallel.hpp"
#include "lowreg/quadrature.hpp"
#include "lowreg/rng.hpp"

namespace lowreg {

namespace {

double anisotropy_factor(int dim) {
  // worst-case overestimate of the lattice shortest path vs the straight
  // line: sec(pi/8) for 8-connectivity; a padded constant for 26-connectivity
  if (dim <= 1) return 1.0;
  if (dim == 2) return 1.0823922002923940;
  return 1.12;
}

double segment_weight(const MetricField& f, const Vec& a, const Vec& b) {
  Vec mid = (a + b) * 0.5;
  return metric_norm(f, mid, b - a);
}

/// Discrete polyline length: midpoint-rule segment weights.
double discrete_length(const MetricField& f, const std::vector<Vec>& xs) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) s += segment_weight(f, xs[i], xs[i + 1]);
  return s;
}

/// Arc length of the polyline measured per segment with the adaptive rule.
double measured_length(const MetricField& f, const std::vector<Vec>& xs, double tol) {
  double s = 0;
  const double perSeg = tol / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    Vec a = xs[i], d = xs[i + 1] - xs[i];
    auto integrand = [&](double u) { return metric_norm(f, a + d * u, d); };
    s += integrate_adaptive(integrand, 0.0, 1.0, {}, {perSeg, 20}).value;
  }
  return s;
}

std::vector<Vec> sample_segment(const Vec& a, const Vec& b, int m) {
  std::vector<Vec> xs(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double u = i / static_cast<double>(m - 1);
    xs[static_cast<std::size_t>(i)] = a * (1.0 - u) + b * u;
  }
  return xs;
}

/// Resample a polyline to m vertices, uniformly by Euclidean arc length.
std::vector<Vec> resample_polyline(const std::vector<Vec>& xs, int m) {
  std::vector<double> cum{0.0};
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    cum.push_back(cum.back() + (xs[i + 1] - xs[i]).norm2());
  double total = cum.back();
  if (total <= 0) return sample_segment(xs.front(), xs.back(), m);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(m));
  std::size_t seg = 0;
  for (int k = 0; k < m; ++k) {
    double target = total * k / static_cast<double>(m - 1);
    while (seg + 2 < cum.size() && cum[seg + 1] < target) ++seg;
    double lo = cum[seg], hi = cum[seg + 1];
    double u = hi > lo ? (target - lo) / (hi - lo) : 0.0;
    out.push_back(xs[seg] * (1.0 - u) + xs[seg + 1] * u);
  }
  out.front() = xs.front();
  out.back() = xs.back();
  return out;
}

}  // namespace

DistanceResult grid_distance(const MetricField& f, const Vec& p, const Vec& q, int gridRes) {
  const int dim = f.domain.dim;
  if (gridRes < 2) throw ParamError("grid_distance: gridRes must be >= 2");
  f.require_inside(p);
  f.require_inside(q);

  // lattice, inset so every node is strictly interior
  std::array<double, 3> lo{}, step{};
  for (int i = 0; i < dim; ++i) {
    double m = 1e-9 * f.domain.extent(i);
    lo[static_cast<std::size_t>(i)] = f.domain.lo[i] + m;
    step[static_cast<std::size_t>(i)] = (f.domain.extent(i) - 2 * m) / (gridRes - 1);
  }
  auto node_point = [&](const std::array<int, 3>& idx) {
    Vec v = Vec::zero(dim);
    for (int i = 0; i < dim; ++i)
      v[i] = lo[static_cast<std::size_t>(i)] + step[static_cast<std::size_t>(i)] * idx[static_cast<std::size_t>(i)];
    return v;
  };
  std::size_t nodes = 1;
  for (int i = 0; i < dim; ++i) nodes *= static_cast<std::size_t>(gridRes);
  auto flat = [&](const std::array<int, 3>& idx) {
    std::size_t fidx = 0, stride = 1;
    for (int i = 0; i < dim; ++i) {
      fidx += static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]) * stride;
      stride *= static_cast<std::size_t>(gridRes);
    }
    return fidx;
  };
  auto unflat = [&](std::size_t fidx) {
    std::array<int, 3> idx{0, 0, 0};
    for (int i = 0; i < dim; ++i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(fidx % static_cast<std::size_t>(gridRes));
      fidx /= static_cast<std::size_t>(gridRes);
    }
    return idx;
  };

  // endpoints are extra nodes wired to the lattice nodes of the surrounding
  // cell block (one ring out, so near-coincidence costs nothing)
  const std::size_t src = nodes, dst = nodes + 1;
  auto cell_of = [&](const Vec& x) {
    std::array<int, 3> c{0, 0, 0};
    for (int i = 0; i < dim; ++i) {
      double s = (x[i] - lo[static_cast<std::size_t>(i)]) / step[static_cast<std::size_t>(i)];
      c[static_cast<std::size_t>(i)] = std::clamp(static_cast<int>(std::floor(s)), 0, gridRes - 1);
    }
    return c;
  };
  auto ring_nodes = [&](const Vec& x) {
    std::array<int, 3> c = cell_of(x);
    std::vector<std::size_t> ids;
    int zlo = dim >= 3 ? -1 : 0, zhi = dim >= 3 ? 2 : 0;
    int ylo = dim >= 2 ? -1 : 0, yhi = dim >= 2 ? 2 : 0;
    for (int dz = zlo; dz <= zhi; ++dz)
      for (int dy = ylo; dy <= yhi; ++dy)
        for (int dx = -1; dx <= 2; ++dx) {
          std::array<int, 3> idx{c[0] + dx, c[1] + dy, c[2] + dz};
          bool ok = true;
          for (int i = 0; i < dim; ++i)
            ok = ok && idx[static_cast<std::size_t>(i)] >= 0 && idx[static_cast<std::size_t>(i)] < gridRes;
          if (ok) ids.push_back(flat(idx));
        }
    return ids;
  };

  // neighbor offsets (full connectivity: 2 / 8 / 26)
  std::vector<std::array<int, 3>> offsets;
  {
    int zr = dim >= 3 ? 1 : 0, yr = dim >= 2 ? 1 : 0;
    for (int dz = -zr; dz <= zr; ++dz)
      for (int dy = -yr; dy <= yr; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (dx || dy || dz) offsets.push_back({dx, dy, dz});
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nodes + 2, inf);
  std::vector<std::int64_t> parent(nodes + 2, -1);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;

  dist[src] = 0;
  heap.push({0.0, src});
  auto relax = [&](std::size_t from, std::size_t to, double w) {
    if (dist[from] + w < dist[to]) {
      dist[to] = dist[from] + w;
      parent[to] = static_cast<std::int64_t>(from);
      heap.push({dist[to], to});
    }
  };
  std::vector<std::size_t> q_ring = ring_nodes(q);
  std::vector<bool> q_adj(nodes, false);
  for (auto id : q_ring) q_adj[id] = true;

  while (!heap.empty()) {
    auto [d0, u] = heap.top();
    heap.pop();
    if (d0 > dist[u]) continue;
    if (u == dst) break;
    if (u == src) {
      for (auto id : ring_nodes(p)) relax(src, id, segment_weight(f, p, node_point(unflat(id))));
      continue;
    }
    Vec up = node_point(unflat(u));
    if (q_adj[u]) relax(u, dst, segment_weight(f, up, q));
    auto idx = unflat(u);
    for (const auto& o : offsets) {
      std::array<int, 3> v{idx[0] + o[0], idx[1] + o[1], idx[2] + o[2]};
      bool ok = true;
      for (int i = 0; i < dim; ++i)
        ok = ok && v[static_cast<std::size_t>(i)] >= 0 && v[static_cast<std::size_t>(i)] < gridRes;
      if (!ok) continue;
      relax(u, flat(v), segment_weight(f, up, node_point(v)));
    }
  }
  if (!std::isfinite(dist[dst])) throw Error("grid_distance: target unreachable");

  DistanceResult res;
  res.value = dist[dst];
  res.errorEstimate = (anisotropy_factor(dim) - 1.0) * dist[dst];
  std::vector<Vec> rev;
  std::int64_t cur = static_cast<std::int64_t>(dst);
  while (cur >= 0) {
    if (cur == static_cast<std::int64_t>(src))
      rev.push_back(p);
    else if (cur == static_cast<std::int64_t>(dst))
      rev.push_back(q);
    else
      rev.push_back(node_point(unflat(static_cast<std::size_t>(cur))));
    cur = parent[static_cast<std::size_t>(cur)];
  }
  res.path.assign(rev.rbegin(), rev.rend());
  return res;
}

DistanceResult refine_polyline(const MetricField& f, std::vector<Vec> xs,
                               const DistanceConfig& cfg) {
  const int dim = f.domain.dim;
  const int m = static_cast<int>(xs.size());
  if (m < 3) {
    DistanceResult r;
    r.path = xs;
    r.value = measured_length(f, xs, cfg.quadTol);
    return r;
  }
  for (auto& x : xs) x = f.domain.clamp_inside(x);

  double cur = discrete_length(f, xs);
  DistanceResult res;
  res.descentTrace.push_back(cur);

  // local re-evaluation: moving vertex i changes segments (i-1,i) and (i,i+1)
  auto local_pair = [&](const std::vector<Vec>& v, int i) {
    return segment_weight(f, v[static_cast<std::size_t>(i - 1)], v[static_cast<std::size_t>(i)]) +
           segment_weight(f, v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i + 1)]);
  };

  std::vector<Vec> grad(static_cast<std::size_t>(m), Vec::zero(dim));
  double alpha = 0.0;
  for (int iter = 0; iter < cfg.maxIters; ++iter) {
    // central-difference gradient of the discrete length
    double gmax = 0;
    for (int i = 1; i < m - 1; ++i) {
      Vec g = Vec::zero(dim);
      const Vec saved = xs[static_cast<std::size_t>(i)];
      for (int c = 0; c < dim; ++c) {
        Vec probe = saved;
        probe[c] = saved[c] + cfg.fdStep;
        xs[static_cast<std::size_t>(i)] = f.domain.clamp_inside(probe);
        double up = local_pair(xs, i);
        probe[c] = saved[c] - cfg.fdStep;
        xs[static_cast<std::size_t>(i)] = f.domain.clamp_inside(probe);
        double dn = local_pair(xs, i);
        xs[static_cast<std::size_t>(i)] = saved;
        g[c] = (up - dn) / (2.0 * cfg.fdStep);
      }
      grad[static_cast<std::size_t>(i)] = g;
      for (int c = 0; c < dim; ++c) gmax = std::max(gmax, std::abs(g[c]));
    }
    if (gmax < 1e-15) break;

    // backtracking on the full-gradient step; warm-started step size
    double seg = (xs[1] - xs[0]).norm2() + 1e-12;
    if (alpha <= 0) alpha = 0.25 * seg / gmax;
    alpha = std::min(alpha * 2.0, 2.0 * seg / gmax);
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<Vec> trial = xs;
      for (int i = 1; i < m - 1; ++i)
        trial[static_cast<std::size_t>(i)] =
            f.domain.clamp_inside(trial[static_cast<std::size_t>(i)] - grad[static_cast<std::size_t>(i)] * alpha);
      double lt = discrete_length(f, trial);
      if (lt < cur) {
        xs = std::move(trial);
        double gain = cur - lt;
        cur = lt;
        res.descentTrace.push_back(cur);
        ++res.iterations;
        accepted = true;
        if (gain < cfg.stepTol) iter = cfg.maxIters;  // converged
        break;
      }
      alpha *= 0.5;  // ties fall through to the smaller step
    }
    if (!accepted) {
      res.stalled = true;
      break;
    }
  }

  res.path = std::move(xs);
  res.value = measured_length(f, res.path, cfg.quadTol);
  res.errorEstimate = std::abs(res.value - cur) + cfg.stepTol;
  return res;
}

DistanceResult distance(const MetricField& f, const Vec& p_in, const Vec& q_in,
                        const DistanceConfig& cfg) {
  if (p_in == q_in) {
    DistanceResult r;
    r.path = {p_in, q_in};
    return r;  // exactly zero, no solve
  }
  // d is symmetric; solving one canonical direction removes direction noise
  Vec p = p_in, q = q_in;
  for (int i = 0; i < p.dim; ++i) {
    if (p[i] < q[i]) break;
    if (p[i] > q[i]) {
      std::swap(p, q);
      break;
    }
  }
  f.require_inside(p);
  f.require_inside(q);

  // constant metrics: the straight chord is optimal (norm triangle inequality)
  if (f.constant_matrix) {
    DistanceResult r;
    Vec d = q - p;
    r.value = std::sqrt(f.constant_matrix->quad(d));
    r.path = {p, q};
    r.errorEstimate = 1e-15 * r.value;
    return r;
  }

  const int m = std::max(3, cfg.polylinePoints);
  DistanceResult best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](DistanceResult cand) {
    if (cand.value < best.value) {
      int it = best.iterations + cand.iterations;
      best = std::move(cand);
      best.iterations = it;
    } else {
      best.iterations += cand.iterations;
    }
  };

  // straight-chord candidate (admissible in a convex box) and its refinement
  double chordLen = measured_length(f, {p, q}, cfg.quadTol);
  {
    DistanceResult chord;
    chord.value = chordLen;
    chord.path = {p, q};
    consider(std::move(chord));
  }
  consider(refine_polyline(f, sample_segment(p, q, m), cfg));

  double gridValue = 0;
  if (cfg.gridRes >= 2) {
    DistanceResult g = grid_distance(f, p, q, cfg.gridRes);
    gridValue = g.value;
    consider(refine_polyline(f, resample_polyline(g.path, m), cfg));
  }

  double prevLevel = best.value;
  int points = m;
  for (int level = 1; level < cfg.levels; ++level) {
    points = 2 * points - 1;
    prevLevel = best.value;
    consider(refine_polyline(f, resample_polyline(best.path, points), cfg));
  }

  // error: level increment plus the anisotropy gap to the lattice value;
  // floored at a relative noise level the descent cannot resolve
  double err = std::abs(prevLevel - best.value);
  if (gridValue > 0)
    err += std::max(0.0, best.value - gridValue / anisotropy_factor(f.domain.dim));
  else
    err += (anisotropy_factor(f.domain.dim) - 1.0) * best.value * 0.1;
  best.errorEstimate = std::max(err + cfg.stepTol, 1e-5 * best.value);
  return best;
}

DistanceMap default_distance_map(const MetricField& f, const ChordMapConfig& cfg) {
  if (f.constant_matrix) {
    Mat g = *f.constant_matrix;
    return [g](const Vec& p, const Vec& q) {
      Vec d = q - p;
      return std::sqrt(g.quad(d));
    };
  }
  auto field = std::make_shared<MetricField>(f);
  double diam = 0;
  for (int i = 0; i < f.domain.dim; ++i) diam += f.domain.extent(i) * f.domain.extent(i);
  diam = std::sqrt(diam);
  DistanceConfig base;
  base.gridRes = 0;  // no lattice; descent from the chord
  base.polylinePoints = cfg.points;
  base.maxIters = cfg.maxIters;
  base.stepTol = cfg.stepTol;
  base.fdStep = cfg.fdStep;
  base.levels = 1;
  base.quadTol = cfg.quadTol;
  const bool adaptive = cfg.adaptivePoints;
  return [field, base, diam, adaptive](const Vec& a, const Vec& b) {
    if (a == b) return 0.0;
    // far-apart endpoints need more vertices to track the geodesic
    DistanceConfig dcfg = base;
    if (adaptive) {
      double rel = (b - a).norm2() / diam;
      if (rel > 0.25) {
        dcfg.polylinePoints = std::max(dcfg.polylinePoints, 25);
        dcfg.levels = 2;
      } else if (rel > 0.05) {
        dcfg.polylinePoints = std::max(dcfg.polylinePoints, 13);
      }
    }
    return distance(*field, a, b, dcfg).value;  // canonicalizes internally
  };
}

DistanceMap euclidean_map() {
  return [](const Vec& a, const Vec& b) { return (b - a).norm2(); };
}

namespace {

void add_check(AxiomReport& rep, std::string name, double worst, int violations, int checked) {
  rep.checks.push_back({std::move(name), worst, violations, checked});
  rep.pass = rep.pass && violations == 0;
}

}  // namespace

AxiomReport verify_metric_axioms(const MetricField& f, const std::vector<Vec>& pts,
                                 const DistanceConfig& cfg) {
  const int k = static_cast<int>(pts.size());
  if (k < 3) throw ParamError("verify_metric_axioms: need at least 3 sample points");

  // all ordered pair distances (parallel fill, deterministic)
  std::vector<double> d(static_cast<std::size_t>(k * k), 0.0);
  std::vector<double> err(static_cast<std::size_t>(k * k), 0.0);
  std::vector<std::pair<int, int>> jobs;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) jobs.emplace_back(i, j);
  par::for_index(jobs.size(), [&](std::size_t n) {
    auto [i, j] = jobs[n];
    DistanceResult r = distance(f, pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)], cfg);
    d[static_cast<std::size_t>(i * k + j)] = r.value;
    err[static_cast<std::size_t>(i * k + j)] = r.errorEstimate;
  });
  std::vector<double> chord(static_cast<std::size_t>(k * k), 0.0);
  par::for_index(jobs.size(), [&](std::size_t n) {
    auto [i, j] = jobs[n];
    if (i < j)
      chord[static_cast<std::size_t>(i * k + j)] =
          measured_length(f, {pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]}, cfg.quadTol);
  });
  ComparisonBounds cb = comparison_bounds(f, f.domain, 65);

  AxiomReport rep;
  {
    double worst = 0;
    int bad = 0;
    for (int i = 0; i < k; ++i) {
      double v = distance(f, pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(i)], cfg).value;
      worst = std::min(worst, -std::abs(v));
      if (v != 0.0) ++bad;
    }
    add_check(rep, "identity d(p,p)=0", worst, bad, k);
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    int bad = 0, cnt = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        double a = d[static_cast<std::size_t>(i * k + j)], b = d[static_cast<std::size_t>(j * k + i)];
        double slack = 2.0 * std::max(err[static_cast<std::size_t>(i * k + j)], err[static_cast<std::size_t>(j * k + i)]);
        double margin = slack - std::abs(a - b);
        worst = std::min(worst, margin);
        if (margin < 0) ++bad;
        ++cnt;
      }
    add_check(rep, "symmetry within 2x errorEstimate", worst, bad, cnt);
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    int bad = 0, cnt = 0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        for (int l = 0; l < k; ++l) {
          if (i == j || j == l || i == l) continue;
          double lhs = d[static_cast<std::size_t>(i * k + l)];
          double rhs = d[static_cast<std::size_t>(i * k + j)] + d[static_cast<std::size_t>(j * k + l)];
          double slack = 3.0 * (err[static_cast<std::size_t>(i * k + l)] + err[static_cast<std::size_t>(i * k + j)] +
                                err[static_cast<std::size_t>(j * k + l)]);
          double margin = rhs + slack - lhs;
          worst = std::min(worst, margin);
          if (margin < 0) ++bad;
          ++cnt;
        }
    add_check(rep, "triangle within 3x errorEstimate", worst, bad, cnt);
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    int bad = 0, cnt = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        double eu = (pts[static_cast<std::size_t>(j)] - pts[static_cast<std::size_t>(i)]).norm2();
        double margin = d[static_cast<std::size_t>(i * k + j)] - cb.lambda0 * eu;
        worst = std::min(worst, margin);
        if (margin < -1e-9) ++bad;
        ++cnt;
      }
    add_check(rep, "lower bound lambda0*|p-q| <= d", worst, bad, cnt);
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    int bad = 0, cnt = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        double margin = chord[static_cast<std::size_t>(i * k + j)] + 1e-9 - d[static_cast<std::size_t>(i * k + j)];
        worst = std::min(worst, margin);
        if (margin < 0) ++bad;
        ++cnt;
      }
    add_check(rep, "upper bound d <= chord arc length + 1e-9", worst, bad, cnt);
  }
  return rep;
}

EquivalenceReport empirical_equivalence(const MetricField& g, const MetricField& h,
                                        const BoxDomain& box, int pairs, const DistanceConfig& cfg,
                                        std::uint64_t seed) {
  if (pairs < 1) throw ParamError("empirical_equivalence: pairs must be >= 1");
  SplitMix64 rng(seed);
  std::vector<std::pair<Vec, Vec>> ps;
  int skipped = 0;
  const double minSep = 1e-3 * box.min_extent();
  while (static_cast<int>(ps.size()) < pairs) {
    Vec a = rng.point_in(box, 1e-3), b = rng.point_in(box, 1e-3);
    if ((b - a).norm2() < minSep) {
      ++skipped;  // below solver resolution, recorded
      continue;
    }
    ps.emplace_back(a, b);
  }
  std::vector<double> ratio(ps.size()), slack(ps.size());
  par::for_index(ps.size(), [&](std::size_t i) {
    DistanceResult dg = distance(g, ps[i].first, ps[i].second, cfg);
    DistanceResult dh = distance(h, ps[i].first, ps[i].second, cfg);
    ratio[i] = dg.value / dh.value;
    slack[i] = dg.errorEstimate / std::max(dg.value, 1e-300) +
               dh.errorEstimate / std::max(dh.value, 1e-300);
  });

  // odd grid so axis-aligned extrema (e.g. a kink plane) are sampled exactly
  FactorPair band = pointwise_factor_pair(g, h, box, 129);
  EquivalenceReport rep;
  rep.bandLo = band.c;
  rep.bandHi = band.C;
  rep.cEmp = ratio[0];
  rep.CEmp = ratio[0];
  rep.pass = true;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    rep.cEmp = std::min(rep.cEmp, ratio[i]);
    rep.CEmp = std::max(rep.CEmp, ratio[i]);
    double widenLo = band.c * (1.0 - 3.0 * slack[i]);
    double widenHi = band.C * (1.0 + 3.0 * slack[i]);
    if (ratio[i] < widenLo || ratio[i] > widenHi) rep.pass = false;
  }
  rep.used = static_cast<int>(ps.size());
  rep.skipped = skipped;
  rep.ratios = std::move(ratio);
  return rep;
}

EquivalenceReport empirical_equivalence_maps(const DistanceMap& dg, const DistanceMap& dh,
                                             const BoxDomain& interval,
                                             const MapEquivalenceConfig& cfg, std::uint64_t seed) {
  SplitMix64 rng(seed);
  EquivalenceReport rep;
  std::vector<double> ratios;
  for (int s = 1; s <= cfg.scales; ++s) {
    double sep = std::pow(10.0, -s) * interval.min_extent();
    for (int k = 0; k < cfg.pairsPerScale; ++k) {
      Vec a = rng.point_in(interval, 1e-3);
      Vec b = a;
      int axis = static_cast<int>(rng.next() % static_cast<std::uint64_t>(interval.dim));
      b[axis] = std::min(a[axis] + sep, interval.hi[axis] - 1e-3 * interval.extent(axis));
      double num = dg(a, b), den = dh(a, b);
      if (den <= 0) continue;
      ratios.push_back(num / den);
    }
  }
  if (ratios.empty()) throw ParamError("empirical_equivalence_maps: no usable pairs");
  rep.cEmp = *std::min_element(ratios.begin(), ratios.end());
  rep.CEmp = *std::max_element(ratios.begin(), ratios.end());
  if (cfg.band) {
    rep.bandLo = cfg.band->first;
    rep.bandHi = cfg.band->second;
    rep.pass = rep.cEmp >= rep.bandLo && rep.CEmp <= rep.bandHi;
  } else {
    rep.bandLo = rep.cEmp;
    rep.bandHi = rep.cEmp * cfg.spreadFactor;
    rep.pass = rep.CEmp <= rep.bandHi;  // equivalent iff the spread stays bounded
  }
  rep.used = static_cast<int>(ratios.size());
  rep.ratios = std::move(ratios);
  return rep;
}

}  // namespace lowreg
