#include "lowreg/suites.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include "lowreg/approx.hpp"
#include "lowreg/curve.hpp"
#include "lowreg/distance.hpp"
#include "lowreg/length.hpp"
#include "lowreg/metric_field.hpp"
#include "lowreg/mollify.hpp"
#include "lowreg/rng.hpp"

namespace lowreg {

namespace {

using Kind = CaseResult::Kind;

struct Recorder {
  VerificationReport rep;
  bool timings = false;

  void record(const std::string& suite, const std::string& name, Kind kind, double expected,
              double tol, const std::function<double()>& observe) {
    auto t0 = std::chrono::steady_clock::now();
    CaseResult c;
    c.suite = suite;
    c.name = name;
    c.kind = kind;
    c.expected = expected;
    c.tolerance = tol;
    try {
      c.observed = observe();
      c.pass = CaseResult::passes(c.observed, expected, tol, kind);
    } catch (const std::exception& e) {
      c.observed = std::numeric_limits<double>::quiet_NaN();
      c.pass = false;
      c.name += " [error: " + std::string(e.what()) + "]";
    }
    auto t1 = std::chrono::steady_clock::now();
    c.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rep.cases.push_back(std::move(c));
  }
};

// ---- shared fixtures --------------------------------------------------

BoxDomain box2() { return BoxDomain::square(-2.0, 2.0, 2); }

MetricField m_eucl() { return make_euclidean(2, box2(), "euclidean"); }
MetricField m_diag14() { return make_constant(Mat::diag({1.0, 4.0}), box2(), "diag14"); }
MetricField m_exp() {
  return make_conformal(Expr::parse("exp(x1)"), box2(), {Regularity::Smooth, 1.0}, "exp2x1");
}
MetricField m_abs() {
  return make_conformal(Expr::parse("1 + abs(x1)"), box2(), {Regularity::Lipschitz, 1.0},
                        "one-plus-abs");
}
MetricField m_sqrt() {
  return make_conformal(Expr::parse("1 + sqrt(abs(x1))"), box2(), {Regularity::Hoelder, 0.5},
                        "one-plus-sqrtabs");
}
MetricField m_4i() { return make_constant(Mat::diag({4.0, 4.0}), box2(), "four-i"); }

struct NamedCurve {
  std::string name;
  Curve curve;
};

std::vector<NamedCurve> test_curves() {
  std::vector<NamedCurve> cs;
  cs.push_back({"segment", make_expr_curve({Expr::parse("-0.9 + 1.8*t"), Expr::parse("-0.6 + 1.4*t")})});
  cs.push_back({"parabola",
                make_expr_curve({Expr::parse("2*t - 1"), Expr::parse("0.8*(2*t - 1)^2 - 0.5")})});
  cs.push_back({"sine", make_expr_curve({Expr::parse("2*t - 1"), Expr::parse("0.5*sin(3*(2*t - 1))")})});
  cs.push_back({"quarter-arc",
                make_expr_curve({Expr::parse("0.9*cos(1.5707963267948966*t)"),
                                 Expr::parse("0.9*sin(1.5707963267948966*t)")})});
  cs.push_back({"l-polyline",
                make_polyline({Vec(-0.5, -0.5), Vec(0.5, -0.5), Vec(0.5, 0.5)})});
  return cs;
}

ChordMapConfig chord_cfg() {
  ChordMapConfig c;
  c.points = 7;
  c.maxIters = 80;
  c.stepTol = 1e-10;
  c.fdStep = 1e-7;
  c.quadTol = 1e-10;
  return c;
}

RefinementConfig refine_cfg_depth(int depth) {
  RefinementConfig c;
  c.tol = 1e-4;
  c.maxDepth = depth;
  c.chordTol = 1e-3;  // solver slack per chord for descent-backed maps
  return c;
}

std::uint64_t suite_seed(const SuiteConfig& cfg, const char* name) {
  return SplitMix64(cfg.seed).fork(fnv1a(name)).state;
}

// random smooth curve: c0 + c1 t + c2 t^2 + c3 sin(2t) + c4 cos(3t) per axis
Curve random_smooth_curve(SplitMix64& rng) {
  std::vector<Expr> comps;
  Expr t = Expr::var(0);
  for (int axis = 0; axis < 2; ++axis) {
    Expr e = Expr::number(rng.uniform(-0.4, 0.4));
    e = Expr::binary(ExprOp::Add, e,
                     Expr::binary(ExprOp::Mul, Expr::number(rng.uniform(-0.25, 0.25)), t));
    e = Expr::binary(ExprOp::Add, e,
                     Expr::binary(ExprOp::Mul, Expr::number(rng.uniform(-0.25, 0.25)),
                                  Expr::binary(ExprOp::Pow, t, Expr::number(2))));
    e = Expr::binary(ExprOp::Add, e,
                     Expr::binary(ExprOp::Mul, Expr::number(rng.uniform(-0.25, 0.25)),
                                  Expr::unary(ExprOp::Sin,
                                              Expr::binary(ExprOp::Mul, Expr::number(2), t))));
    e = Expr::binary(ExprOp::Add, e,
                     Expr::binary(ExprOp::Mul, Expr::number(rng.uniform(-0.25, 0.25)),
                                  Expr::unary(ExprOp::Cos,
                                              Expr::binary(ExprOp::Mul, Expr::number(3), t))));
    comps.push_back(e);
  }
  return make_expr_curve(std::move(comps));
}

// ---- suites -----------------------------------------------------------

/// Lazily computed per-combo quantities; a failure surfaces in every case
/// that depends on them.
struct ComboVals {
  double L = 0, Ld = 0, Lt = 0;
  bool done = false;
  std::string err;
};

void suite_smooth_equality(Recorder& rec, const SuiteConfig&) {
  const std::string suite = "smooth-equality";
  std::vector<MetricField> metrics{m_eucl(), m_diag14(), m_exp()};
  for (const auto& m : metrics) {
    DistanceMap d = default_distance_map(m, chord_cfg());
    for (const auto& [cname, curve] : test_curves()) {
      auto vals = std::make_shared<ComboVals>();
      auto ensure = [vals, m, d, curve = curve]() {
        if (!vals->done) {
          vals->done = true;
          try {
            vals->L = arc_length(m, curve).value;
            vals->Ld = induced_length(d, curve, refine_cfg_depth(10)).value;
          } catch (const std::exception& e) {
            vals->err = e.what();
          }
        }
        if (!vals->err.empty()) throw Error(vals->err);
      };
      rec.record(suite, m.name + "/" + cname + " |Ld-L|/L", Kind::Equals, 0.0, 5e-3, [=] {
        ensure();
        return std::abs(vals->Ld - vals->L) / vals->L;
      });
      rec.record(suite, m.name + "/" + cname + " ld-le-l (Ld-L)/L", Kind::AtMost, 0.0, 5e-3, [=] {
        ensure();
        return (vals->Ld - vals->L) / vals->L;
      });
    }
  }
}

void suite_continuous_equality(Recorder& rec, const SuiteConfig&) {
  const std::string suite = "continuous-equality";
  MetricDerivativeConfig dcfg;
  dcfg.delta0 = 1e-2;
  dcfg.halvings = 6;
  QuadratureConfig quad;
  quad.absTol = 1e-4;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
  for (const auto& m : {m_abs(), m_sqrt()}) {
    DistanceMap d = default_distance_map(m, chord_cfg());
    for (const auto& [cname, curve] : test_curves()) {
      auto vals = std::make_shared<ComboVals>();
      auto ensure = [vals, m, d, quad, dcfg, curve = curve]() {
        if (!vals->done) {
          vals->done = true;
          try {
            vals->L = arc_length(m, curve).value;
            vals->Ld = induced_length(d, curve, refine_cfg_depth(10)).value;
            vals->Lt = metric_arc_length(d, curve, quad, dcfg).value;
          } catch (const std::exception& e) {
            vals->err = e.what();
          }
        }
        if (!vals->err.empty()) throw Error(vals->err);
      };
      rec.record(suite, m.name + "/" + cname + " |L-Ld|rel", Kind::Equals, 0.0, 1e-2, [=] {
        ensure();
        return rel(vals->L, vals->Ld);
      });
      rec.record(suite, m.name + "/" + cname + " |L-Lt|rel", Kind::Equals, 0.0, 1e-2, [=] {
        ensure();
        return rel(vals->L, vals->Lt);
      });
      rec.record(suite, m.name + "/" + cname + " |Ld-Lt|rel", Kind::Equals, 0.0, 1e-2, [=] {
        ensure();
        return rel(vals->Ld, vals->Lt);
      });
      rec.record(suite, m.name + "/" + cname + " ld-le-l (Ld-L)/L", Kind::AtMost, 0.0, 1e-2, [=] {
        ensure();
        return (vals->Ld - vals->L) / vals->L;
      });
    }
  }
}

void suite_cantor_gap(Recorder& rec, const SuiteConfig&) {
  const std::string suite = "cantor-gap";
  Curve cantor = make_cantor_graph(60, 6);
  MetricField eucl = m_eucl();
  DistanceMap d = euclidean_map();

  auto L = std::make_shared<double>(0.0);
  rec.record(suite, "arc length = 1", Kind::Equals, 1.0, 1e-6, [=] {
    *L = arc_length(eucl, cantor).value;
    return *L;
  });

  RefinementConfig rcfg;
  rcfg.tol = 0.0;  // run to full depth
  rcfg.maxDepth = 12;
  rcfg.chordTol = 1e-12;
  auto Ld = std::make_shared<double>(0.0);
  auto minIncrement = std::make_shared<double>(0.0);
  rec.record(suite, "induced length depth 12 >= 1.95", Kind::AtLeast, 1.95, 0.0, [=] {
    LengthResult r = induced_length(d, cantor, rcfg);
    *Ld = r.value;
    const auto& lv = r.trace->levels;
    *minIncrement = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < lv.size(); ++i)
      *minIncrement = std::min(*minIncrement, lv[i].chordSum - lv[i - 1].chordSum);
    return *Ld;
  });
  rec.record(suite, "induced length depth 12 <= 2", Kind::AtMost, 2.0, 0.0, [=] { return *Ld; });
  rec.record(suite, "chord sums monotone in depth", Kind::AtLeast, 0.0, 1e-12,
             [=] { return *minIncrement; });

  MetricDerivativeConfig dcfg;
  dcfg.delta0 = 1e-2;
  dcfg.halvings = 26;  // pushes the unresolved neighborhood of the Cantor set below 1%
  QuadratureConfig quad;
  quad.absTol = 1e-3;
  rec.record(suite, "metric arc-length = 1", Kind::Equals, 1.0, 2e-2,
             [=] { return metric_arc_length(d, cantor, quad, dcfg).value; });
  rec.record(suite, "gap Ld - L persists", Kind::AtLeast, 0.9, 0.0, [=] { return *Ld - *L; });
}

void suite_lipschitz_dac(Recorder& rec, const SuiteConfig& cfg) {
  const std::string suite = "lipschitz-dac";
  SplitMix64 rng(suite_seed(cfg, "lipschitz-dac"));
  std::vector<std::pair<Curve, Curve>> pairs;
  for (int i = 0; i < 100; ++i) {
    Curve a = random_smooth_curve(rng);
    Curve b = random_smooth_curve(rng);
    pairs.emplace_back(std::move(a), std::move(b));
  }
  QuadratureConfig quad;
  quad.absTol = 1e-6;
  // the sup term only widens the right-hand side; a lean chord map suffices
  ChordMapConfig lean;
  lean.points = 9;
  lean.maxIters = 40;
  lean.stepTol = 1e-8;
  lean.quadTol = 1e-8;
  lean.adaptivePoints = false;
  for (const auto& m : {m_eucl(), m_abs()}) {
    DistanceMap d = m.name == "euclidean" ? euclidean_map() : default_distance_map(m, lean);
    rec.record(suite, m.name + " worst |L(a)-L(b)| - Dac over 100 pairs", Kind::AtMost, 0.0, 1e-9,
               [&] {
                 double worst = -std::numeric_limits<double>::infinity();
                 for (const auto& [a, b] : pairs) {
                   double la = arc_length(m, a).value;
                   double lb = arc_length(m, b).value;
                   double dac = variational_distance(m, a, b, d, quad);
                   worst = std::max(worst, std::abs(la - lb) - dac);
                 }
                 return worst;
               });
  }
}

void suite_density_lambda_eta(Recorder& rec, const SuiteConfig&) {
  const std::string suite = "density-lambda-eta";
  MetricField eucl = m_eucl();
  std::vector<BoxDomain> cover{BoxDomain::square(-0.25, 1.25, 2)};
  std::vector<NamedCurve> curves;
  curves.push_back({"kinked", make_expr_curve({Expr::parse("t"), Expr::parse("abs(t - 0.5)")},
                                              std::nullopt, {0.5})});
  curves.push_back({"t-two-thirds",
                    make_expr_curve({Expr::parse("t"), Expr::parse("t^(2/3)")})});
  for (const auto& [cname, curve] : curves) {
    auto measured = std::make_shared<std::map<double, double>>();
    for (double eta : {1e-1, 1e-2}) {
      // the bound 10*N*eta is fixed by the single-box cover: N = 1
      rec.record(suite, cname + " eta=" + std::to_string(eta) + " Dac <= 10*N*eta", Kind::AtMost,
                 10.0 * eta, 1e-6, [=, curve = curve] {
                   SmoothApproxResult res = smooth_approximation(eucl, curve, eta, cover);
                   if (res.chartCount != 1)
                     throw Error("expected a single-piece cover, got N=" +
                                 std::to_string(res.chartCount));
                   (*measured)[eta] = res.dacMeasured;
                   return res.dacMeasured;
                 });
    }
    rec.record(suite, cname + " Dac nonincreasing in eta", Kind::AtMost, 0.0, 1e-12, [=] {
      if (measured->size() != 2) throw Error("approximation runs missing");
      return measured->at(1e-2) - measured->at(1e-1);
    });
  }
}

void suite_mollify_sandwich(Recorder& rec, const SuiteConfig& cfg) {
  const std::string suite = "mollify-sandwich";
  MetricField base = m_abs();
  std::uint64_t seed = suite_seed(cfg, "mollify-sandwich");
  for (int n : {5, 10}) {
    MollifiedMetric mol = mollify_metric(base, n, 64, seed);
    double lo = (n - 1.0) / n, hi = (n + 1.0) / n;
    RatioRange rr = norm_ratio_range(base, mol.field, mol.effectiveDomain, seed ^ 0x5bd1e995u, 1000);
    rec.record(suite, "n=" + std::to_string(n) + " min norm ratio", Kind::AtLeast, lo, 1e-3,
               [=] { return rr.lo; });
    rec.record(suite, "n=" + std::to_string(n) + " max norm ratio", Kind::AtMost, hi, 1e-3,
               [=] { return rr.hi; });

    SplitMix64 rng(seed ^ static_cast<std::uint64_t>(n));
    std::vector<std::pair<Vec, Vec>> pairs;
    BoxDomain inner = BoxDomain::square(-1.0, 1.0, 2);
    for (int i = 0; i < 10; ++i) {
      Vec a = rng.point_in(inner), b = rng.point_in(inner);
      if ((b - a).norm2() < 0.05) {
        --i;
        continue;
      }
      pairs.emplace_back(a, b);
    }
    DistanceConfig dcfg;
    dcfg.gridRes = 48;
    dcfg.polylinePoints = 17;
    dcfg.maxIters = 200;
    MollifyDistanceReport mdr = mollified_distance_check(base, mol, pairs, dcfg);
    rec.record(suite, "n=" + std::to_string(n) + " distance ratio band violations", Kind::Equals,
               0.0, 0.0, [=] {
                 int bad = 0;
                 for (const auto& row : mdr.rows)
                   if (!row.pass) ++bad;
                 return static_cast<double>(bad);
               });
  }
}

void suite_derivative_equality(Recorder& rec, const SuiteConfig&) {
  const std::string suite = "derivative-equality";
  std::vector<double> ts;
  for (int k = 0; k < 20; ++k) ts.push_back(0.05 + 0.9 * (k + 0.5) / 20.0);
  auto curves = test_curves();
  MetricDerivativeConfig dcfg;
  for (const auto& m : {m_eucl(), m_exp(), m_abs()}) {
    for (int ci : {0, 1, 2}) {  // segment, parabola, sine
      const auto& [cname, curve] = curves[static_cast<std::size_t>(ci)];
      DerivativeEqualityReport rep = derivative_equality_report(m, curve, ts, dcfg);
      rec.record(suite, m.name + "/" + cname + " max |mder - |g'|_g|", Kind::Equals, 0.0, 1e-2,
                 [=] { return rep.maxDiff; });
      rec.record(suite, m.name + "/" + cname + " minimality excess", Kind::AtMost, 0.0, 1e-3,
                 [=] { return rep.maxExcess; });
    }
  }
}

void suite_equivalence_constants(Recorder& rec, const SuiteConfig& cfg) {
  const std::string suite = "equivalence-constants";
  std::uint64_t seed = suite_seed(cfg, "equivalence-constants");
  BoxDomain inner = BoxDomain::square(-1.0, 1.0, 2);
  DistanceConfig dcfg;
  dcfg.gridRes = 48;
  dcfg.polylinePoints = 17;
  dcfg.maxIters = 200;

  EquivalenceReport a = empirical_equivalence(m_abs(), m_eucl(), inner, 20, dcfg, seed);
  rec.record(suite, "(1+|x1|)^2 vs euclidean: min ratio >= 1", Kind::AtLeast, 1.0, 1e-2,
             [=] { return a.cEmp; });
  rec.record(suite, "(1+|x1|)^2 vs euclidean: max ratio <= 2", Kind::AtMost, 2.0, 1e-2,
             [=] { return a.CEmp; });
  rec.record(suite, "(1+|x1|)^2 vs euclidean: inside a-priori band", Kind::Equals, 1.0, 0.0,
             [=] { return a.pass ? 1.0 : 0.0; });

  EquivalenceReport b = empirical_equivalence(m_4i(), m_eucl(), inner, 20, dcfg, seed ^ 0x9e37u);
  rec.record(suite, "4I vs euclidean: min ratio = 2", Kind::Equals, 2.0, 1e-6,
             [=] { return b.cEmp; });
  rec.record(suite, "4I vs euclidean: max ratio = 2", Kind::Equals, 2.0, 1e-6,
             [=] { return b.CEmp; });
}

void suite_metric_axioms(Recorder& rec, const SuiteConfig& cfg) {
  const std::string suite = "metric-axioms";
  std::uint64_t seed = suite_seed(cfg, "metric-axioms");
  DistanceConfig dcfg;
  dcfg.gridRes = 48;
  dcfg.polylinePoints = 17;
  dcfg.maxIters = 150;
  BoxDomain inner = BoxDomain::square(-1.2, 1.2, 2);
  for (const auto& m : {m_eucl(), m_diag14(), m_exp(), m_abs(), m_sqrt()}) {
    SplitMix64 rng(seed ^ fnv1a(m.name.c_str()));
    std::vector<Vec> pts;
    for (int i = 0; i < 15; ++i) pts.push_back(rng.point_in(inner));
    AxiomReport rep = verify_metric_axioms(m, pts, dcfg);
    for (const auto& chk : rep.checks)
      rec.record(suite, m.name + ": " + chk.name, Kind::Equals, 0.0, 0.0,
                 [=] { return static_cast<double>(chk.violations); });
  }
}

void suite_snowflake(Recorder& rec, const SuiteConfig& cfg) {
  const std::string suite = "snowflake-counterexample";
  DistanceMap d1 = [](const Vec& a, const Vec& b) { return std::abs(a[0] - b[0]); };
  DistanceMap d2 = [d1](const Vec& a, const Vec& b) { return std::sqrt(d1(a, b)); };
  rec.record(suite, "ratio d2/d1 at |x-y|=1e-6 equals 1e3", Kind::Equals, 1e3, 1e-6, [&] {
    Vec x = Vec::scalar(0.0), y = Vec::scalar(1e-6);
    return d2(x, y) / d1(x, y);
  });
  BoxDomain interval(Vec::scalar(0.0), Vec::scalar(1.0));
  MapEquivalenceConfig mcfg;
  std::uint64_t seed = suite_seed(cfg, "snowflake");
  rec.record(suite, "equivalence checker reports non-equivalence", Kind::Equals, 0.0, 0.0, [&] {
    EquivalenceReport rep = empirical_equivalence_maps(d2, d1, interval, mcfg, seed);
    return rep.pass ? 1.0 : 0.0;
  });
  rec.record(suite, "sanity: 2*d1 vs d1 reported equivalent", Kind::Equals, 1.0, 0.0, [&] {
    DistanceMap d3 = [d1](const Vec& a, const Vec& b) { return 2.0 * d1(a, b); };
    EquivalenceReport rep = empirical_equivalence_maps(d3, d1, interval, mcfg, seed ^ 1);
    return rep.pass ? 1.0 : 0.0;
  });
}

using SuiteFn = void (*)(Recorder&, const SuiteConfig&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"smooth-equality", suite_smooth_equality},
      {"continuous-equality", suite_continuous_equality},
      {"cantor-gap", suite_cantor_gap},
      {"mollify-sandwich", suite_mollify_sandwich},
      {"derivative-equality", suite_derivative_equality},
      {"lipschitz-dac", suite_lipschitz_dac},
      {"density-lambda-eta", suite_density_lambda_eta},
      {"equivalence-constants", suite_equivalence_constants},
      {"metric-axioms", suite_metric_axioms},
      {"snowflake-counterexample", suite_snowflake},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    n.push_back("all");
    return n;
  }();
  return names;
}

VerificationReport run_suite(const std::string& name, const SuiteConfig& cfg) {
  Recorder rec;
  rec.timings = cfg.timings;
  rec.rep.suite = name;
  rec.rep.config = nlohmann::json{{"seed", cfg.seed}, {"timings", cfg.timings}};
  if (name == "all") {
    for (const auto& [sname, fn] : registry()) fn(rec, cfg);
    return rec.rep;
  }
  for (const auto& [sname, fn] : registry()) {
    if (sname == name) {
      fn(rec, cfg);
      return rec.rep;
    }
  }
  throw ParamError("unknown suite '" + name + "'");
}

}  // namespace lowreg
