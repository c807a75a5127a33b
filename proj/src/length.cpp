#include "lowreg/length.hpp"

#include <algorithm>
#include <cmath>

#include "lowreg/parallel.hpp"

namespace lowreg {

QuadratureConfig default_quadrature(const MetricField& f) {
  QuadratureConfig q;
  q.absTol = f.regularity.kind == Regularity::Smooth ? 1e-9 : 1e-6;
  return q;
}

namespace {

/// Metric speed with the a.e. convention: at an undefined parameter, nudge
/// once to the side; a node that stays undefined contributes zero and is
/// counted (the declared null set).
struct SpeedIntegrand {
  const MetricField& f;
  const Curve& c;
  mutable long long evals = 0;
  mutable long long undefined = 0;

  double operator()(double t) const {
    ++evals;
    auto d = c.derivative(t);
    double tt = t;
    if (!d) {
      tt = t + (t < 0.5 ? 1e-12 : -1e-12);
      d = c.derivative(tt);
    }
    if (!d) {
      ++undefined;
      return 0.0;
    }
    return metric_norm(f, c.eval(tt), *d);
  }
};

}  // namespace

LengthResult arc_length(const MetricField& f, const Curve& c) {
  return arc_length(f, c, default_quadrature(f));
}

LengthResult arc_length(const MetricField& f, const Curve& c, QuadratureConfig quad) {
  SpeedIntegrand integrand{f, c};
  QuadResult q = integrate_adaptive([&](double t) { return integrand(t); }, 0.0, 1.0, c.knots(),
                                    quad);
  LengthResult r;
  r.value = q.value;
  r.estimatedError = q.errorEstimate;
  r.evaluations = integrand.evals;
  r.undefinedFraction =
      integrand.evals ? integrand.undefined / static_cast<double>(integrand.evals) : 0.0;
  if (r.undefinedFraction > 1e-3) {
    r.nonAcWarning = true;
    r.warnings.push_back("derivative undefined on " + std::to_string(r.undefinedFraction * 100) +
                         "% of quadrature nodes; curve fails the AC screen");
  }
  return r;
}

namespace {

Partition refine_midpoints(const Partition& p) {
  Partition out;
  out.breakpoints.reserve(p.breakpoints.size() * 2 - 1);
  for (std::size_t i = 0; i + 1 < p.breakpoints.size(); ++i) {
    out.breakpoints.push_back(p.breakpoints[i]);
    out.breakpoints.push_back(0.5 * (p.breakpoints[i] + p.breakpoints[i + 1]));
  }
  out.breakpoints.push_back(p.breakpoints.back());
  return out;
}

/// Chord sum over a partition: parallel fill, fixed-order serial sum.
double chord_sum(const DistanceMap& d, const Curve& c, const Partition& p, long long& evals) {
  const std::size_t n = p.breakpoints.size() - 1;
  std::vector<Vec> pts(p.breakpoints.size());
  for (std::size_t i = 0; i < p.breakpoints.size(); ++i) pts[i] = c.eval(p.breakpoints[i]);
  std::vector<double> chords(n);
  par::for_index(n, [&](std::size_t i) { chords[i] = d(pts[i], pts[i + 1]); });
  evals += static_cast<long long>(n);
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += chords[i];
  return s;
}

}  // namespace

LengthResult induced_length(const DistanceMap& d, const Curve& c, RefinementConfig cfg) {
  LengthResult r;
  RefinementTrace trace;
  Partition part{c.knots()};
  double prev = 0;
  for (int depth = 0; depth <= cfg.maxDepth; ++depth) {
    if (depth > 0) part = refine_midpoints(part);
    double s = chord_sum(d, c, part, r.evaluations);
    std::size_t count = part.breakpoints.size() - 1;
    trace.levels.push_back({depth, count, s, part});
    if (depth > 0) {
      if (s < prev - 2.0 * cfg.chordTol * static_cast<double>(count))
        throw DistanceInconsistency(
            "induced_length: chord sum decreased beyond solver slack at depth " +
            std::to_string(depth) + " (" + std::to_string(prev) + " -> " + std::to_string(s) +
            ")");
      if (depth >= cfg.minDepth && s - prev < cfg.tol) {
        prev = s;
        break;
      }
    }
    prev = s;
  }
  r.value = prev;
  const auto& lv = trace.levels;
  r.estimatedError = lv.size() >= 2 ? std::max(0.0, lv.back().chordSum - lv[lv.size() - 2].chordSum)
                                    : 0.0;
  r.estimatedError += cfg.chordTol * static_cast<double>(lv.back().chordCount);
  r.trace = std::move(trace);
  return r;
}

std::vector<double> induced_length_profile(const DistanceMap& d, const Curve& c,
                                           const std::vector<double>& ts, RefinementConfig cfg) {
  for (double t : ts)
    if (!(t >= 0.0 && t <= 1.0)) throw ParamError("profile: times must lie in [0,1]");
  if (!std::is_sorted(ts.begin(), ts.end())) throw ParamError("profile: times must be sorted");

  // anchor the shared refinement at the knots and at the requested times
  Partition part{c.knots()};
  for (double t : ts) part.breakpoints.push_back(t);
  std::sort(part.breakpoints.begin(), part.breakpoints.end());
  part.breakpoints.erase(std::unique(part.breakpoints.begin(), part.breakpoints.end()),
                         part.breakpoints.end());

  long long evals = 0;
  double prev = chord_sum(d, c, part, evals);
  for (int depth = 1; depth <= cfg.maxDepth; ++depth) {
    Partition next = refine_midpoints(part);
    double s = chord_sum(d, c, next, evals);
    part = std::move(next);
    if (depth >= cfg.minDepth && s - prev < cfg.tol) {
      prev = s;
      break;
    }
    prev = s;
  }

  // prefix chord sums at the requested times (each t is a breakpoint)
  const auto& bp = part.breakpoints;
  std::vector<Vec> pts(bp.size());
  for (std::size_t i = 0; i < bp.size(); ++i) pts[i] = c.eval(bp[i]);
  std::vector<double> chords(bp.size() - 1);
  par::for_index(chords.size(), [&](std::size_t i) { chords[i] = d(pts[i], pts[i + 1]); });
  std::vector<double> prefix(bp.size(), 0.0);
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) prefix[i + 1] = prefix[i] + chords[i];

  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) {
    auto it = std::lower_bound(bp.begin(), bp.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - bp.begin());
    if (it == bp.end() || std::abs(*it - t) > 1e-12) {
      if (idx > 0 && std::abs(bp[idx - 1] - t) <= 1e-12) --idx;
    }
    out.push_back(prefix[std::min(idx, bp.size() - 1)]);
  }
  return out;
}

MetricDerivativeResult metric_derivative(const DistanceMap& d, const Curve& c, double t,
                                         const MetricDerivativeConfig& cfg) {
  if (!(t > 0.0 && t < 1.0)) throw ParamError("metric_derivative: t must be interior to (0,1)");
  if (cfg.halvings < 2) throw ParamError("metric_derivative: halvings must be >= 2");

  // clamp the schedule so t +- delta stays inside [0,1]
  double dstart = std::min(cfg.delta0, 0.45 * std::min(t, 1.0 - t));
  Vec base = c.eval(t);
  MetricDerivativeResult res;
  double mPrev = 0, mLast = 0, qpLast = 0, qmLast = 0;
  for (int k = 0; k <= cfg.halvings; ++k) {
    double delta = dstart * std::pow(0.5, k);
    double qp = d(base, c.eval(t + delta)) / delta;
    double qm = d(base, c.eval(t - delta)) / delta;
    res.evaluations += 2;
    mPrev = mLast;
    mLast = 0.5 * (qp + qm);
    qpLast = qp;
    qmLast = qm;
  }
  double scale = std::max(std::abs(mLast), 1e-12);
  res.converged = std::abs(mLast - mPrev) <= cfg.convergeRelTol * scale &&
                  std::abs(qpLast - qmLast) <= cfg.sidedRelTol * scale;
  res.value = cfg.extrapolate ? (4.0 * mLast - mPrev) / 3.0 : mLast;
  if (!res.converged) res.value = mLast;  // best two-sided estimate, flagged
  return res;
}

LengthResult metric_arc_length(const DistanceMap& d, const Curve& c, QuadratureConfig quad,
                               const MetricDerivativeConfig& deriv) {
  struct PanelPass {
    double value = 0;
    long long evals = 0;
    long long nodes = 0, nonconv = 0;
  };
  auto run = [&](int panelsPerPiece) {
    // fixed composite GK15 between knots; non-converged nodes drop out of
    // their panel's weighted average (a.e. integrand, declared null set)
    static const double kW[15] = {
        0.0229353220105292, 0.0630920926299785, 0.1047900103222502, 0.1406532597155259,
        0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278,
        0.2044329400752989, 0.1903505780647854, 0.1690047266392679, 0.1406532597155259,
        0.1047900103222502, 0.0630920926299785, 0.0229353220105292};
    const auto& knots = c.knots();
    struct Node {
      double t, w, halfWidth;
      int panel;
    };
    std::vector<Node> nodes;
    int panelIdx = 0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      double h = (knots[i + 1] - knots[i]) / panelsPerPiece;
      if (h <= 0) continue;
      for (int k = 0; k < panelsPerPiece; ++k, ++panelIdx) {
        double a = knots[i] + k * h;
        auto ts = gk15_nodes(a, a + h);
        for (int j = 0; j < 15; ++j) nodes.push_back({ts[static_cast<std::size_t>(j)], kW[j], 0.5 * h, panelIdx});
      }
    }
    std::vector<double> vals(nodes.size());
    std::vector<char> ok(nodes.size());
    std::vector<long long> ev(nodes.size());
    par::for_index(nodes.size(), [&](std::size_t i) {
      auto r = metric_derivative(d, c, nodes[i].t, deriv);
      vals[i] = r.value;
      ok[i] = r.converged ? 1 : 0;
      ev[i] = r.evaluations;
    });
    PanelPass pass;
    pass.nodes = static_cast<long long>(nodes.size());
    for (auto e : ev) pass.evals += e;
    for (auto o : ok)
      if (!o) ++pass.nonconv;
    // per-panel weighted mean over converged nodes
    for (std::size_t i = 0; i < nodes.size();) {
      int panel = nodes[i].panel;
      double wsum = 0, acc = 0, wall = 0, accAll = 0, half = nodes[i].halfWidth;
      std::size_t j = i;
      for (; j < nodes.size() && nodes[j].panel == panel; ++j) {
        wall += nodes[j].w;
        accAll += nodes[j].w * vals[j];
        if (ok[j]) {
          wsum += nodes[j].w;
          acc += nodes[j].w * vals[j];
        }
      }
      double mean = wsum > 0 ? acc / wsum : (wall > 0 ? accAll / wall : 0.0);
      pass.value += mean * 2.0 * half;
      i = j;
    }
    return pass;
  };

  int panels = 8;
  PanelPass coarse = run(panels);
  PanelPass fine = run(2 * panels);
  while (std::abs(fine.value - coarse.value) > quad.absTol && panels < 64) {
    panels *= 2;
    coarse = fine;
    fine = run(2 * panels);
  }
  LengthResult r;
  r.value = fine.value;
  r.estimatedError = std::abs(fine.value - coarse.value);
  r.evaluations = coarse.evals + fine.evals;
  double frac = (coarse.nonconv + fine.nonconv) / static_cast<double>(coarse.nodes + fine.nodes);
  r.undefinedFraction = frac;
  if (frac > 0.01)
    throw Error("metric_arc_length: derivative limit failed to converge at " +
                std::to_string(frac * 100) + "% of quadrature nodes");
  return r;
}

double variational_distance(const MetricField& f, const Curve& a, const Curve& b,
                            const DistanceMap& d, QuadratureConfig quad,
                            const VariationalConfig& vcfg) {
  if (a.dim() != b.dim()) throw ParamError("variational_distance: dimension mismatch");
  double fa = ac_defined_fraction(a), fb = ac_defined_fraction(b);
  if (fa < vcfg.acThreshold || fb < vcfg.acThreshold)
    throw std::invalid_argument(
        "variational_distance: input fails the AC screen (derivative defined at " +
        std::to_string(std::min(fa, fb) * 100) + "% of nodes)");

  // sup term: dense midpoint samples, then golden-section refinement around
  // the largest ones
  const int n = vcfg.supSamples;
  std::vector<double> vals(static_cast<std::size_t>(n));
  par::for_index(static_cast<std::size_t>(n), [&](std::size_t i) {
    double t = (static_cast<double>(i) + 0.5) / n;
    vals[i] = d(a.eval(t), b.eval(t));
  });
  double sup = 0;
  std::vector<std::size_t> order(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    order[i] = i;
    sup = std::max(sup, vals[i]);
  }
  std::partial_sort(order.begin(), order.begin() + std::min<std::size_t>(order.size(), static_cast<std::size_t>(vcfg.refineTop)),
                    order.end(), [&](std::size_t x, std::size_t y) { return vals[x] > vals[y]; });
  auto gap = [&](double t) { return d(a.eval(t), b.eval(t)); };
  const double golden = 0.6180339887498949;
  for (int k = 0; k < std::min<int>(vcfg.refineTop, n); ++k) {
    double center = (static_cast<double>(order[static_cast<std::size_t>(k)]) + 0.5) / n;
    double lo = std::max(0.0, center - 1.0 / n), hi = std::min(1.0, center + 1.0 / n);
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    double f1 = gap(x1), f2 = gap(x2);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + golden * (hi - lo);
        f2 = gap(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - golden * (hi - lo);
        f1 = gap(x1);
      }
    }
    sup = std::max({sup, f1, f2});
  }

  // integral term: speeds at each curve's own base point
  std::vector<double> splits = a.knots();
  for (double k : b.knots()) splits.push_back(k);
  auto speed = [&](const Curve& c, double t) -> double {
    auto dv = c.derivative(t);
    double tt = t;
    if (!dv) {
      tt = t + (t < 0.5 ? 1e-12 : -1e-12);
      dv = c.derivative(tt);
    }
    if (!dv) return 0.0;
    return metric_norm(f, c.eval(tt), *dv);
  };
  QuadResult integral = integrate_adaptive(
      [&](double t) { return std::abs(speed(a, t) - speed(b, t)); }, 0.0, 1.0, splits, quad);

  return sup + integral.value;
}

}  // namespace lowreg
