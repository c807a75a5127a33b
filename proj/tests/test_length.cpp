#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lowreg/curve.hpp"
#include "lowreg/distance.hpp"
#include "lowreg/length.hpp"
#include "lowreg/metric_field.hpp"
#include "lowreg/rng.hpp"

using namespace lowreg;

namespace {

BoxDomain box22() { return BoxDomain::square(-2.0, 2.0, 2); }
BoxDomain box44() { return BoxDomain::square(-4.0, 6.0, 2); }

MetricField eucl() { return make_euclidean(2, box44()); }
MetricField exp_metric() {
  return make_conformal(Expr::parse("exp(x1)"), box22(), {Regularity::Smooth, 1.0}, "exp2x1");
}

}  // namespace

TEST_CASE("arc_length: euclidean segment") {
  LengthResult r = arc_length(eucl(), make_segment(Vec(0, 0), Vec(3, 4)));
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(r.estimatedError >= 0);
  CHECK_FALSE(r.nonAcWarning);
}

TEST_CASE("arc_length: exp metric against a 1e6-node trapezoid oracle") {
  // g = e^{2 x1} I along (t, 0): speed e^t, closed form e - 1
  Curve seg = make_expr_curve({Expr::parse("t"), Expr::parse("0")});
  LengthResult r = arc_length(exp_metric(), seg);
  const int n = 1000000;
  double trap = 0.5 * (std::exp(0.0) + std::exp(1.0));
  for (int k = 1; k < n; ++k) trap += std::exp(k / static_cast<double>(n));
  trap /= n;
  CHECK(r.value == doctest::Approx(trap).epsilon(1e-10));
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-9));
}

TEST_CASE("arc_length: cantor graph has length 1 and no false warning") {
  LengthResult r = arc_length(eucl(), make_cantor_graph());
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.undefinedFraction <= 1e-3);
}

TEST_CASE("induced_length: straight segment is exact at every depth") {
  Curve seg = make_segment(Vec(0, 0), Vec(3, 4));
  LengthResult r = induced_length(euclidean_map(), seg, {0.0, 6, 0, 1e-12});
  REQUIRE(r.trace.has_value());
  for (const auto& lv : r.trace->levels) CHECK(lv.chordSum == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("induced_length: unit semicircle chord sums match the closed form") {
  // semicircle (cos pi t, sin pi t); at dyadic depth k the partition is
  // uniform, so the chord sum is 2^k * 2 sin(pi / 2^{k+1})
  Curve semi = make_expr_curve({Expr::parse("cos(3.141592653589793*t)"),
                                Expr::parse("sin(3.141592653589793*t)")});
  RefinementConfig cfg;
  cfg.tol = 0.0;
  cfg.maxDepth = 10;
  cfg.chordTol = 1e-12;
  LengthResult r = induced_length(euclidean_map(), semi, cfg);
  REQUIRE(r.trace.has_value());
  const double pi = 3.141592653589793;
  for (const auto& lv : r.trace->levels) {
    double n = static_cast<double>(lv.chordCount);
    double oracle = n * 2.0 * std::sin(pi / (2.0 * n));
    CHECK(lv.chordSum == doctest::Approx(oracle).epsilon(1e-12));
  }
  CHECK(r.value == doctest::Approx(pi).epsilon(1e-3));
}

TEST_CASE("induced_length: cantor graph bracket and monotonicity") {
  Curve cantor = make_cantor_graph(60, 6);
  RefinementConfig cfg;
  cfg.tol = 0.0;
  cfg.maxDepth = 12;
  cfg.chordTol = 1e-12;
  LengthResult r = induced_length(euclidean_map(), cantor, cfg);
  CHECK(r.value >= 1.95);
  CHECK(r.value <= 2.0);
  const auto& lv = r.trace->levels;
  for (std::size_t i = 1; i < lv.size(); ++i)
    CHECK(lv[i].chordSum >= lv[i - 1].chordSum - 1e-12);
}

TEST_CASE("induced_length: decreasing chord sums raise the inconsistency error") {
  // a "distance" that shrinks under refinement (violates the triangle
  // inequality wildly): d = |a-b|^2 on a segment of length 3
  DistanceMap bad = [](const Vec& a, const Vec& b) {
    double e = (b - a).norm2();
    return e * e;
  };
  Curve seg = make_segment(Vec(0, 0), Vec(3, 0));
  CHECK_THROWS_AS(induced_length(bad, seg, {1e-6, 8, 0, 1e-9}), DistanceInconsistency);
}

TEST_CASE("induced_length_profile examples") {
  Curve seg = make_segment(Vec(0, 0), Vec(3, 4));
  auto prof = induced_length_profile(euclidean_map(), seg, {0.0, 0.4, 1.0});
  CHECK(prof[0] == 0.0);
  CHECK(prof[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(prof[2] == doctest::Approx(5.0).epsilon(1e-12));

  Curve cantor = make_cantor_graph(60, 6);
  RefinementConfig cfg;
  cfg.tol = 0.0;
  cfg.maxDepth = 10;
  auto pc = induced_length_profile(euclidean_map(), cantor, {0.0, 0.25, 0.5, 0.75, 1.0}, cfg);
  for (std::size_t i = 1; i < pc.size(); ++i) CHECK(pc[i] >= pc[i - 1]);
  CHECK(pc.back() > 1.9);  // depth-limited approach to 2
  CHECK(pc.front() == 0.0);

  CHECK_THROWS_AS(induced_length_profile(euclidean_map(), seg, {0.5, 0.2}), ParamError);
}

TEST_CASE("profile increments bounded by the speed integral (AC surrogate)") {
  MetricField m = eucl();
  Curve curve = make_expr_curve({Expr::parse("t"), Expr::parse("0.5*sin(3*t)")});
  std::vector<double> ts{0.0, 0.2, 0.45, 0.7, 1.0};
  auto prof = induced_length_profile(euclidean_map(), curve, ts);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    LengthResult seg = arc_length(m, restrict(curve, ts[i - 1], ts[i]));
    CHECK(prof[i] - prof[i - 1] <= seg.value + 1e-6);
  }
}

TEST_CASE("metric_arc_length examples") {
  Curve seg = make_segment(Vec(0, 0), Vec(3, 4));
  MetricDerivativeConfig dcfg;
  LengthResult r = metric_arc_length(euclidean_map(), seg, {1e-6, 24}, dcfg);
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-3));

  // exp metric along the x-axis: d((a,0),(b,0)) = e^b - e^a in closed form
  DistanceMap dexp = [](const Vec& a, const Vec& b) {
    return std::abs(std::exp(b[0]) - std::exp(a[0]));
  };
  Curve axis = make_expr_curve({Expr::parse("t"), Expr::parse("0")});
  LengthResult re = metric_arc_length(dexp, axis, {1e-6, 24}, dcfg);
  CHECK(re.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-2));

  // cantor graph: the metric arc-length stays at 1, exhibiting the gap to Ld
  MetricDerivativeConfig deep;
  deep.halvings = 26;
  LengthResult rc = metric_arc_length(euclidean_map(), make_cantor_graph(60, 6), {1e-3, 24}, deep);
  CHECK(rc.value == doctest::Approx(1.0).epsilon(2e-2));
  CHECK(rc.undefinedFraction < 0.01);
}

TEST_CASE("variational_distance examples") {
  MetricField m = eucl();
  Curve a = make_expr_curve({Expr::parse("t"), Expr::parse("0")});
  Curve b = make_expr_curve({Expr::parse("t"), Expr::parse("0.25")});
  CHECK(variational_distance(m, a, a, euclidean_map()) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(variational_distance(m, a, b, euclidean_map()) == doctest::Approx(0.25).epsilon(1e-9));

  // sup |t - t^2| = 1/4 at t = 1/2; integral of |1 - 2t| = 1/2
  Curve c = make_expr_curve({Expr::parse("t^2"), Expr::parse("0")});
  double v = variational_distance(m, a, c, euclidean_map());
  CHECK(v == doctest::Approx(0.75).epsilon(1e-6));
  // dense-sampling cross-check of the sup term
  double sup = 0;
  for (int k = 0; k <= 100000; ++k) {
    double t = k / 100000.0;
    sup = std::max(sup, t - t * t);
  }
  CHECK(sup == doctest::Approx(0.25).epsilon(1e-9));

  CHECK_THROWS_AS(variational_distance(m, a, make_cantor_graph(8, 2), euclidean_map()),
                  std::invalid_argument);
}

TEST_CASE("L_d <= L across curves and depths") {
  MetricField m = exp_metric();
  DistanceMap d = default_distance_map(m);
  for (const char* ys : {"0.3*t", "0.5*sin(3*t)", "0.8*(2*t - 1)^2 - 0.5"}) {
    Curve curve = make_expr_curve({Expr::parse("2*t - 1"), Expr::parse(ys)});
    double L = arc_length(m, curve).value;
    for (int depth : {2, 5, 8}) {
      RefinementConfig cfg;
      cfg.tol = 0.0;
      cfg.maxDepth = depth;
      cfg.chordTol = 1e-3;
      LengthResult ld = induced_length(d, curve, cfg);
      CHECK(ld.value <= L + 1e-4 + 5e-3 * L);
    }
  }
}

TEST_CASE("Lipschitz bound |L(a)-L(b)| <= Dac on 100 random pairs") {
  MetricField m = eucl();
  SplitMix64 rng(31337);
  auto rand_curve = [&]() {
    Expr t = Expr::var(0);
    std::vector<Expr> comps;
    for (int axis = 0; axis < 2; ++axis) {
      Expr e = Expr::number(rng.uniform(-0.5, 0.5));
      e = Expr::binary(ExprOp::Add, e,
                       Expr::binary(ExprOp::Mul, Expr::number(rng.uniform(-0.4, 0.4)), t));
      e = Expr::binary(
          ExprOp::Add, e,
          Expr::binary(ExprOp::Mul, Expr::number(rng.uniform(-0.3, 0.3)),
                       Expr::unary(ExprOp::Sin, Expr::binary(ExprOp::Mul, Expr::number(3), t))));
      comps.push_back(e);
    }
    return make_expr_curve(std::move(comps));
  };
  for (int i = 0; i < 100; ++i) {
    Curve a = rand_curve(), b = rand_curve();
    double la = arc_length(m, a).value, lb = arc_length(m, b).value;
    double dac = variational_distance(m, a, b, euclidean_map());
    CHECK(std::abs(la - lb) <= dac + 1e-9);
  }
}

TEST_CASE("Dac symmetry and triangle inequality") {
  MetricField m = eucl();
  SplitMix64 rng(5150);
  auto rand_curve = [&]() {
    Expr t = Expr::var(0);
    std::vector<Expr> comps;
    for (int axis = 0; axis < 2; ++axis) {
      Expr e = Expr::number(rng.uniform(-0.5, 0.5));
      e = Expr::binary(ExprOp::Add, e,
                       Expr::binary(ExprOp::Mul, Expr::number(rng.uniform(-0.4, 0.4)), t));
      e = Expr::binary(
          ExprOp::Add, e,
          Expr::binary(ExprOp::Mul, Expr::number(rng.uniform(-0.3, 0.3)),
                       Expr::unary(ExprOp::Cos, Expr::binary(ExprOp::Mul, Expr::number(2), t))));
      comps.push_back(e);
    }
    return make_expr_curve(std::move(comps));
  };
  for (int i = 0; i < 50; ++i) {
    Curve a = rand_curve(), b = rand_curve(), c = rand_curve();
    double ab = variational_distance(m, a, b, euclidean_map());
    double ba = variational_distance(m, b, a, euclidean_map());
    CHECK(std::abs(ab - ba) <= 1e-12);
    double ac = variational_distance(m, a, c, euclidean_map());
    double cb = variational_distance(m, c, b, euclidean_map());
    // sampling tolerance: the sup term is sampled, so allow a small slack
    CHECK(ab <= ac + cb + 3e-4);
  }
}
