#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "lowreg/distance.hpp"
#include "lowreg/length.hpp"
#include "lowreg/rng.hpp"

using namespace lowreg;

namespace {

BoxDomain box22() { return BoxDomain::square(-2.0, 2.0, 2); }

MetricField eucl_box(double lo, double hi) {
  return make_euclidean(2, BoxDomain::square(lo, hi, 2));
}

MetricField abs_metric() {
  return make_conformal(Expr::parse("1 + abs(x1)"), box22(), {Regularity::Lipschitz, 1.0},
                        "one-plus-abs");
}

MetricField exp_metric() {
  return make_conformal(Expr::parse("exp(x1)"), box22(), {Regularity::Smooth, 1.0}, "exp2x1");
}

// Exhaustive oracle: shortest 8-connected lattice path on a small integer
// grid by value iteration (no heap, no early exit), independent of the
// Dijkstra implementation.
double lattice_oracle(const std::function<double(Vec, Vec)>& w, int nx, int ny,
                      std::pair<int, int> s, std::pair<int, int> t) {
  std::vector<double> dist(static_cast<std::size_t>(nx * ny),
                           std::numeric_limits<double>::infinity());
  auto id = [&](int x, int y) { return static_cast<std::size_t>(y * nx + x); };
  dist[id(s.first, s.second)] = 0.0;
  for (int sweep = 0; sweep < nx * ny; ++sweep) {
    bool changed = false;
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (!dx && !dy) continue;
            int px = x + dx, py = y + dy;
            if (px < 0 || py < 0 || px >= nx || py >= ny) continue;
            double cand = dist[id(px, py)] +
                          w(Vec(static_cast<double>(px), static_cast<double>(py)),
                            Vec(static_cast<double>(x), static_cast<double>(y)));
            if (cand < dist[id(x, y)] - 1e-15) {
              dist[id(x, y)] = cand;
              changed = true;
            }
          }
    if (!changed) break;
  }
  return dist[id(t.first, t.second)];
}

}  // namespace

TEST_CASE("grid_distance: axis and diagonal aligned paths are exact") {
  MetricField m = eucl_box(-2.0, 2.0);
  DistanceResult r1 = grid_distance(m, Vec(0, 0), Vec(1, 0), 33);  // 33 nodes: step 0.125
  CHECK(r1.value == doctest::Approx(1.0).epsilon(1e-6));
  DistanceResult r2 = grid_distance(m, Vec(0, 0), Vec(1, 1), 33);
  CHECK(r2.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK_THROWS_AS(grid_distance(m, Vec(0, 0), Vec(5, 0), 33), DomainError);
}

TEST_CASE("grid_distance: knight-move endpoint vs the exhaustive oracle") {
  // euclidean lattice: best 8-connected path (0,0)->(2,1) is diag + straight
  auto weight = [](Vec a, Vec b) { return (b - a).norm2(); };
  double oracle = lattice_oracle(weight, 5, 4, {0, 0}, {2, 1});
  CHECK(oracle == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));

  MetricField m = eucl_box(-2.0, 2.0);
  DistanceResult r = grid_distance(m, Vec(0, 0), Vec(2, 1), 17);  // nodes on integers
  CHECK(r.value == doctest::Approx(oracle).epsilon(1e-6));
  double truth = std::sqrt(5.0);
  CHECK(r.value <= 1.083 * truth);
  CHECK(r.value >= truth - 1e-9);
}

TEST_CASE("grid_distance agrees with the oracle under a variable metric") {
  // weights from the conformal metric at edge midpoints, on the integer
  // sub-lattice {0..4}x{0..3} mapped into the domain
  MetricField m = abs_metric();
  auto to_dom = [](const Vec& p) { return Vec(p[0] * 0.25 - 1.0, p[1] * 0.25 - 0.5); };
  auto weight = [&](Vec a, Vec b) {
    Vec pa = to_dom(a), pb = to_dom(b);
    return metric_norm(m, (pa + pb) * 0.5, pb - pa);
  };
  double oracle = lattice_oracle(weight, 5, 4, {0, 0}, {4, 3});
  // the same geometry through grid_distance: endpoints on lattice nodes of a
  // 17-node grid over [-2,2]^2 spaced 0.25
  DistanceResult r = grid_distance(m, to_dom(Vec(0, 0)), to_dom(Vec(4, 3)), 17);
  CHECK(r.value == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("refine_polyline: descends to the straight segment") {
  MetricField m = eucl_box(-1.0, 5.0);
  // bent initial path
  std::vector<Vec> path{Vec(0, 0), Vec(0.5, 2.0), Vec(1.5, 1.0), Vec(2.5, 3.5), Vec(3, 4)};
  DistanceConfig cfg;
  cfg.maxIters = 2000;
  cfg.stepTol = 1e-12;
  DistanceResult r = refine_polyline(m, path, cfg);
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-4));
  // monotone descent, exactly
  for (std::size_t i = 1; i < r.descentTrace.size(); ++i)
    CHECK(r.descentTrace[i] < r.descentTrace[i - 1]);
}

TEST_CASE("refine_polyline: constant diagonal metric keeps the chord optimal") {
  MetricField m = make_constant(Mat::diag({1.0, 4.0}), BoxDomain::square(-1.0, 3.0, 2), "diag14");
  std::vector<Vec> path{Vec(0, 0), Vec(0.3, 0.8), Vec(0.6, 0.2), Vec(1, 1)};
  DistanceConfig cfg;
  cfg.maxIters = 3000;
  cfg.stepTol = 1e-13;
  cfg.fdStep = 1e-7;
  DistanceResult r = refine_polyline(m, path, cfg);
  CHECK(r.value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-3));
}

TEST_CASE("refine_polyline: exp metric reaches e-1 with the Dijkstra oracle") {
  MetricField m = exp_metric();
  DistanceConfig cfg;
  cfg.maxIters = 2000;
  cfg.stepTol = 1e-12;
  std::vector<Vec> init;
  for (int k = 0; k < 17; ++k) {
    double u = k / 16.0;
    init.push_back(Vec(u, 0.15 * std::sin(3.14159 * u)));  // perturbed start
  }
  DistanceResult r = refine_polyline(m, init, cfg);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(5e-3));
  // straight chord gives the lower bound integral exactly; the fine lattice
  // initializer cross-checks from above
  DistanceResult g = grid_distance(m, Vec(0, 0), Vec(1, 0), 512);
  CHECK(r.value <= g.value + 1e-9);
  CHECK(g.value <= (std::exp(1.0) - 1.0) * 1.083);
}

TEST_CASE("distance: euclidean and degenerate inputs") {
  MetricField m = eucl_box(-1.0, 5.0);
  DistanceResult r = distance(m, Vec(0, 0), Vec(3, 4));
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-4));
  DistanceResult z = distance(m, Vec(1, 1), Vec(1, 1));
  CHECK(z.value == 0.0);
  CHECK(z.iterations == 0);
}

TEST_CASE("distance: conformal kink metric against the straight-chord value") {
  // straight chord (-1,0)->(1,0) has length int (1+|t|) dt = 3 and is optimal
  MetricField m = abs_metric();
  DistanceConfig cfg;
  cfg.gridRes = 64;
  DistanceResult r = distance(m, Vec(-1, 0), Vec(1, 0), cfg);
  CHECK(r.value == doctest::Approx(3.0).epsilon(5e-3));
  // high-resolution lattice oracle from above
  DistanceResult g = grid_distance(m, Vec(-1, 0), Vec(1, 0), 512);
  CHECK(r.value <= g.value + 1e-9);
  CHECK(g.value >= 3.0 - 1e-9);
}

TEST_CASE("distance: admissible-path upper bound via the chord") {
  MetricField m = exp_metric();
  SplitMix64 rng(77);
  BoxDomain inner = BoxDomain::square(-1.5, 1.5, 2);
  for (int i = 0; i < 10; ++i) {
    Vec p = rng.point_in(inner), q = rng.point_in(inner);
    DistanceResult r = distance(m, p, q);
    LengthResult chord = arc_length(m, make_segment(p, q));
    CHECK(r.value <= chord.value + 1e-9);
  }
}

TEST_CASE("distance: euclidean comparison sandwich") {
  MetricField m = abs_metric();
  BoxDomain inner = BoxDomain::square(-1.0, 1.0, 2);
  ComparisonBounds cb = comparison_bounds(m, m.domain, 65);
  SplitMix64 rng(88);
  for (int i = 0; i < 8; ++i) {
    Vec p = rng.point_in(inner), q = rng.point_in(inner);
    DistanceResult r = distance(m, p, q);
    double e = (q - p).norm2();
    CHECK(cb.lambda0 * e <= r.value + 1e-9);
    CHECK(r.value <= cb.mu0 * e * (1 + 1e-6) + 1e-9);
  }
}

TEST_CASE("distance: level convergence is monotone") {
  MetricField m = exp_metric();
  DistanceConfig c1;
  c1.levels = 1;
  DistanceConfig c3;
  c3.levels = 3;
  Vec p(-0.8, -0.7), q(0.9, 0.6);
  double v1 = distance(m, p, q, c1).value;
  double v3 = distance(m, p, q, c3).value;
  CHECK(v3 <= v1 + 1e-12);
}

TEST_CASE("default_distance_map is symmetric and vanishes on the diagonal") {
  MetricField m = abs_metric();
  DistanceMap d = default_distance_map(m);
  SplitMix64 rng(99);
  BoxDomain inner = BoxDomain::square(-1.0, 1.0, 2);
  for (int i = 0; i < 20; ++i) {
    Vec p = rng.point_in(inner), q = rng.point_in(inner);
    CHECK(d(p, q) == d(q, p));  // exact, by canonicalization
    CHECK(d(p, p) == 0.0);
    CHECK(d(p, q) >= 0.0);
  }
}

TEST_CASE("verify_metric_axioms: euclidean sample passes with margin") {
  MetricField m = eucl_box(-2.0, 2.0);
  SplitMix64 rng(4242);
  std::vector<Vec> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(rng.point_in(BoxDomain::square(-1.5, 1.5, 2)));
  AxiomReport rep = verify_metric_axioms(m, pts, {});
  CHECK(rep.pass);
  for (const auto& chk : rep.checks) {
    CHECK(chk.violations == 0);
    CHECK(chk.worstMargin >= -1e-6);
  }
  CHECK_THROWS_AS(verify_metric_axioms(m, {Vec(0, 0), Vec(1, 1)}, {}), ParamError);
}

TEST_CASE("verify_metric_axioms: degenerate coincident sample") {
  MetricField m = eucl_box(-2.0, 2.0);
  std::vector<Vec> pts{Vec(0.5, 0.5), Vec(0.5, 0.5), Vec(0.5, 0.5)};
  AxiomReport rep = verify_metric_axioms(m, pts, {});
  CHECK(rep.pass);
}

TEST_CASE("empirical_equivalence: conformal scaling gives ratio 2 exactly") {
  MetricField four = make_constant(Mat::diag({4.0, 4.0}), box22(), "four-i");
  MetricField one = make_euclidean(2, box22());
  EquivalenceReport rep =
      empirical_equivalence(four, one, BoxDomain::square(-1.0, 1.0, 2), 15, {}, 7);
  CHECK(rep.cEmp == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rep.CEmp == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rep.pass);
}

TEST_CASE("empirical_equivalence: kink conformal metric stays in the [1,2] band") {
  EquivalenceReport rep = empirical_equivalence(abs_metric(), make_euclidean(2, box22()),
                                                BoxDomain::square(-1.0, 1.0, 2), 12, {}, 11);
  CHECK(rep.cEmp >= 1.0 - 1e-2);
  CHECK(rep.CEmp <= 2.0 + 1e-2);
  CHECK(rep.pass);
}

TEST_CASE("empirical_equivalence_maps: snowflake is flagged, scaling is not") {
  DistanceMap d1 = [](const Vec& a, const Vec& b) { return std::abs(a[0] - b[0]); };
  DistanceMap d2 = [d1](const Vec& a, const Vec& b) { return std::sqrt(d1(a, b)); };
  BoxDomain interval(Vec::scalar(0.0), Vec::scalar(1.0));
  EquivalenceReport snow = empirical_equivalence_maps(d2, d1, interval, {}, 13);
  CHECK_FALSE(snow.pass);
  CHECK(snow.CEmp / snow.cEmp > 100.0);

  DistanceMap d3 = [d1](const Vec& a, const Vec& b) { return 2.0 * d1(a, b); };
  EquivalenceReport ok = empirical_equivalence_maps(d3, d1, interval, {}, 13);
  CHECK(ok.pass);
}

TEST_CASE("distance symmetry and triangle within solver slack, sampled") {
  MetricField m = exp_metric();
  DistanceConfig cfg;
  cfg.gridRes = 32;
  cfg.polylinePoints = 17;
  SplitMix64 rng(31415);
  BoxDomain inner = BoxDomain::square(-1.0, 1.0, 2);
  for (int i = 0; i < 12; ++i) {
    Vec p = rng.point_in(inner), q = rng.point_in(inner), s = rng.point_in(inner);
    DistanceResult pq = distance(m, p, q, cfg);
    DistanceResult qp = distance(m, q, p, cfg);
    CHECK(std::abs(pq.value - qp.value) <= 2.0 * std::max(pq.errorEstimate, qp.errorEstimate));
    DistanceResult ps = distance(m, p, s, cfg);
    DistanceResult sq = distance(m, s, q, cfg);
    CHECK(pq.value <=
          ps.value + sq.value + 3.0 * (pq.errorEstimate + ps.errorEstimate + sq.errorEstimate));
  }
}
