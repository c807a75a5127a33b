#include "lowreg/approx.hpp"

#include <algorithm>
#include <cmath>

#include "lowreg/parallel.hpp"
#include "lowreg/quadrature.hpp"

namespace lowreg {

DerivativeEqualityReport derivative_equality_report(const MetricField& f, const Curve& c,
                                                    const std::vector<double>& ts,
                                                    const MetricDerivativeConfig& cfg) {
  DistanceMap d = default_distance_map(f);
  DerivativeEqualityReport rep;
  rep.rows.resize(ts.size());
  par::for_index(ts.size(), [&](std::size_t i) {
    double t = ts[i];
    auto md = metric_derivative(d, c, t, cfg);
    auto dv = c.derivative(t);
    if (!dv) throw ParamError("derivative_equality_report: analytic derivative undefined at t=" +
                              std::to_string(t) + "; pick times away from knots");
    DerivativeEqualityReport::Row row;
    row.t = t;
    row.metricSide = md.value;
    row.analyticSide = metric_norm(f, c.eval(t), *dv);
    row.converged = md.converged;
    rep.rows[i] = row;
  });
  double sum = 0;
  rep.maxExcess = -std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows) {
    double diff = std::abs(row.metricSide - row.analyticSide);
    rep.maxDiff = std::max(rep.maxDiff, diff);
    rep.maxExcess = std::max(rep.maxExcess, row.metricSide - row.analyticSide);
    sum += diff;
  }
  rep.meanDiff = rep.rows.empty() ? 0.0 : sum / static_cast<double>(rep.rows.size());
  rep.pass = rep.maxDiff < 1e-2;
  return rep;
}

namespace {

// normalized 1-D bump kernel on [-eps, eps]: rho(s) = C/eps (1-(s/eps)^2)^4,
// C = 315/256 so the mass is exactly 1
constexpr double kBumpNorm = 315.0 / 256.0;

double bump(double u) {
  double w = 1.0 - u * u;
  if (w <= 0) return 0.0;
  double w2 = w * w;
  return kBumpNorm * w2 * w2;
}
double bump_deriv(double u) {
  double w = 1.0 - u * u;
  if (w <= 0) return 0.0;
  return kBumpNorm * 4.0 * w * w * w * (-2.0 * u);
}

/// One mollified piece of the curve: smooth interior, straight joins pinned
/// to the original endpoints.
struct MollifiedPiece {
  Curve base;
  double a = 0, b = 0;       // piece interval
  double delta = 0, eps = 0; // join width, kernel width
  Vec startJoinFrom, startJoinTo;  // gamma(a) -> gamma_eps(a+delta)
  Vec endJoinFrom, endJoinTo;      // gamma_eps(b-delta) -> gamma(b)

  Vec smooth_eval(double t) const {
    // gamma_eps(t) = int gamma(t-s) rho_eps(s) ds, two GK15 panels split at 0
    Vec acc = Vec::zero(base.dim());
    for (int half = 0; half < 2; ++half) {
      double lo = half == 0 ? -eps : 0.0;
      double hi = half == 0 ? 0.0 : eps;
      acc = acc + gk15_vec([&](double s) { return base.eval(clamp01(t - s)) * (bump(s / eps) / eps); },
                           lo, hi);
    }
    return acc;
  }
  Vec smooth_deriv(double t) const {
    Vec acc = Vec::zero(base.dim());
    for (int half = 0; half < 2; ++half) {
      double lo = half == 0 ? -eps : 0.0;
      double hi = half == 0 ? 0.0 : eps;
      acc = acc + gk15_vec(
                      [&](double s) { return base.eval(clamp01(t - s)) * (bump_deriv(s / eps) / (eps * eps)); },
                      lo, hi);
    }
    return acc;
  }

  static double clamp01(double t) { return std::clamp(t, 0.0, 1.0); }

  template <class F>
  static Vec gk15_vec(F&& fn, double lo, double hi) {
    static const double kX[8] = {0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
                                 0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
                                 0.2077849550078985, 0.0};
    static const double kW[8] = {0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
                                 0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
                                 0.2044329400752989, 0.2094821410847278};
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    Vec acc = fn(mid) * kW[7];
    for (int i = 0; i < 7; ++i) {
      double dx = half * kX[i];
      acc = acc + (fn(mid - dx) + fn(mid + dx)) * kW[i];
    }
    return acc * half;
  }
};

struct LambdaEtaImpl : Curve::Impl {
  std::vector<MollifiedPiece> pieces;
  int dimension = 0;

  const MollifiedPiece& piece_at(double t) const {
    for (const auto& p : pieces)
      if (t <= p.b || &p == &pieces.back()) return p;
    return pieces.back();
  }

  Vec eval(double t) const override {
    const auto& p = piece_at(t);
    if (t <= p.a + p.delta) {
      double u = (t - p.a) / p.delta;
      return p.startJoinFrom * (1.0 - u) + p.startJoinTo * u;
    }
    if (t >= p.b - p.delta) {
      double u = (t - (p.b - p.delta)) / p.delta;
      return p.endJoinFrom * (1.0 - u) + p.endJoinTo * u;
    }
    return p.smooth_eval(t);
  }
  std::optional<Vec> derivative(double t) const override {
    const auto& p = piece_at(t);
    double j1 = p.a + p.delta, j2 = p.b - p.delta;
    if (std::abs(t - p.a) < 1e-13 || std::abs(t - j1) < 1e-13 || std::abs(t - j2) < 1e-13 ||
        std::abs(t - p.b) < 1e-13)
      return std::nullopt;  // join knots
    if (t < j1) return (p.startJoinTo - p.startJoinFrom) * (1.0 / p.delta);
    if (t > j2) return (p.endJoinTo - p.endJoinFrom) * (1.0 / p.delta);
    return p.smooth_deriv(t);
  }
  int dim() const override { return dimension; }
  std::string kind() const override { return "composite"; }
};

}  // namespace

SmoothApproxResult smooth_approximation(const MetricField& f, const Curve& gamma, double eta,
                                        const std::vector<BoxDomain>& chartBoxes,
                                        const SmoothApproxConfig& cfg) {
  if (!(eta > 0)) throw ParamError("smooth_approximation: eta must be positive");
  if (chartBoxes.empty()) throw CoverError("smooth_approximation: empty chart cover");
  if (ac_defined_fraction(gamma) < 0.999)
    throw std::invalid_argument("smooth_approximation: curve fails the AC screen");

  // assign [0,1] pieces to cover boxes (greedy march over a fine sample)
  const int probe = 4096;
  std::vector<double> cuts{0.0};
  {
    int current = -1;
    for (int k = 0; k <= probe; ++k) {
      double t = k / static_cast<double>(probe);
      Vec p = gamma.eval(t);
      if (current >= 0 && chartBoxes[static_cast<std::size_t>(current)].contains_strict(p)) continue;
      int found = -1;
      for (std::size_t b = 0; b < chartBoxes.size(); ++b)
        if (chartBoxes[b].contains_strict(p)) {
          found = static_cast<int>(b);
          break;
        }
      if (found < 0)
        throw CoverError("smooth_approximation: curve leaves the chart cover at t=" +
                         std::to_string(t) + ", point " + to_string(p));
      if (current >= 0) cuts.push_back(t);
      current = found;
    }
  }
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const int pieceCount = static_cast<int>(cuts.size()) - 1;

  const int oscGrid = std::max(cfg.oscGridMin, static_cast<int>(std::ceil(64.0 / eta)));
  const double etaEff = eta * cfg.etaSafety;

  auto impl = std::make_shared<LambdaEtaImpl>();
  impl->dimension = gamma.dim();
  std::vector<double> knots;
  double lastDelta = 0, lastEps = 0;

  for (int pi = 0; pi < pieceCount; ++pi) {
    double a = cuts[static_cast<std::size_t>(pi)], b = cuts[static_cast<std::size_t>(pi) + 1];
    double len = b - a;

    auto speed = [&](double t) {
      auto dv = gamma.derivative(t);
      double tt = t;
      if (!dv) {
        tt = t + (t < 0.5 ? 1e-12 : -1e-12);
        dv = gamma.derivative(tt);
      }
      if (!dv) return 0.0;
      return metric_norm(f, gamma.eval(tt), *dv);
    };

    // delta: largest halving of the piece with both 2*delta-window bounds
    // below eta. The scan grid refines itself when delta would drop below
    // its resolution (singular speeds need very short joins).
    double delta = 0;
    int grid = oscGrid;
    std::vector<double> F;
    std::vector<Vec> pos;
    double h = 0;
    for (; grid <= (1 << 21); grid *= 2) {
      h = len / grid;
      F.assign(static_cast<std::size_t>(grid) + 1, 0.0);
      pos.assign(static_cast<std::size_t>(grid) + 1, Vec::zero(gamma.dim()));
      std::vector<double> cell(static_cast<std::size_t>(grid));
      par::for_index(static_cast<std::size_t>(grid), [&](std::size_t k) {
        double lo = a + static_cast<double>(k) * h;
        cell[k] = gk15(speed, lo, lo + h);
        pos[k] = gamma.eval(lo);
      });
      pos[static_cast<std::size_t>(grid)] = gamma.eval(b);
      for (int k = 0; k < grid; ++k)
        F[static_cast<std::size_t>(k) + 1] = F[static_cast<std::size_t>(k)] + cell[static_cast<std::size_t>(k)];

      auto window_ok = [&](double d) {
        int w = std::max(1, static_cast<int>(std::ceil(2.0 * d / h)));
        for (int k = 0; k + w <= grid; ++k) {
          if (F[static_cast<std::size_t>(k + w)] - F[static_cast<std::size_t>(k)] >= etaEff) return false;
          double osc = 0;
          for (int i = 0; i < gamma.dim(); ++i)
            osc = std::max(osc, std::abs(pos[static_cast<std::size_t>(k + w)][i] - pos[static_cast<std::size_t>(k)][i]));
          if (osc >= etaEff) return false;
        }
        return true;
      };
      delta = 0.49 * len;
      bool ok = false;
      for (int it = 0; it < 80; ++it) {
        if (delta < 4.0 * h) break;
        if (window_ok(delta)) {
          ok = true;
          break;
        }
        delta *= 0.5;
      }
      if (ok) break;
      delta = 0;
    }
    if (delta == 0)
      throw ResolutionError("smooth_approximation: eta=" + std::to_string(eta) +
                            " is below the oscillation-scan resolution; increase the grid");

    // epsilon: shrink the kernel until the uniform and L1-derivative
    // deviations on the interior fall below eta
    MollifiedPiece piece;
    piece.base = gamma;
    piece.a = a;
    piece.b = b;
    piece.delta = delta;
    double eps = delta * 0.99;
    bool epsOk = false;
    for (int it = 0; it < cfg.maxEpsHalvings; ++it) {
      piece.eps = eps;
      double lo = a + delta, hi = b - delta;
      double unif = 0, l1 = 0;
      int G = cfg.checkGrid;
      std::vector<double> udev(static_cast<std::size_t>(G)), dnorm(static_cast<std::size_t>(G));
      par::for_index(static_cast<std::size_t>(G), [&](std::size_t k) {
        double t = lo + (hi - lo) * (static_cast<double>(k) + 0.5) / G;
        Vec ge = piece.smooth_eval(t), g = gamma.eval(t);
        double u = 0;
        for (int i = 0; i < g.dim; ++i) u = std::max(u, std::abs(ge[i] - g[i]));
        udev[k] = u;
        auto dv = gamma.derivative(t);
        if (!dv) dv = gamma.derivative(t + 1e-12);
        Vec de = piece.smooth_deriv(t);
        dnorm[k] = dv ? (de - *dv).norm2() : 0.0;
      });
      for (int k = 0; k < G; ++k) {
        unif = std::max(unif, udev[static_cast<std::size_t>(k)]);
        l1 += dnorm[static_cast<std::size_t>(k)] * (hi - lo) / G;
      }
      if (unif < etaEff && l1 < etaEff) {
        epsOk = true;
        break;
      }
      eps *= 0.5;
      if (eps < 1e-12)
        break;
    }
    if (!epsOk)
      throw ResolutionError("smooth_approximation: no kernel width meets eta=" +
                            std::to_string(eta) + " on piece [" + std::to_string(a) + "," +
                            std::to_string(b) + "]");

    piece.startJoinFrom = gamma.eval(a);
    piece.startJoinTo = piece.smooth_eval(a + delta);
    piece.endJoinFrom = piece.smooth_eval(b - delta);
    piece.endJoinTo = gamma.eval(b);
    impl->pieces.push_back(piece);
    knots.push_back(a);
    knots.push_back(a + delta);
    knots.push_back(b - delta);
    knots.push_back(b);
    lastDelta = delta;
    lastEps = piece.eps;
  }

  Curve lambda(impl, std::move(knots));

  SmoothApproxResult res;
  res.curve = lambda;
  res.eta = eta;
  res.chartCount = pieceCount;
  res.dacBound = 10.0 * pieceCount * eta;
  res.delta = lastDelta;
  res.epsilon = lastEps;

  DistanceMap d = default_distance_map(f);
  VariationalConfig vcfg;
  vcfg.supSamples = cfg.supSamples;
  QuadratureConfig quad;
  quad.absTol = std::min(1e-6, eta * 1e-3);
  res.dacMeasured = variational_distance(f, gamma, lambda, d, quad, vcfg);
  return res;
}

}  // namespace lowreg
