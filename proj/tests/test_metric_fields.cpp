#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lowreg/linalg.hpp"
#include "lowreg/metric_field.hpp"
#include "lowreg/rng.hpp"

using namespace lowreg;

namespace {

BoxDomain box22() { return BoxDomain::square(-2.0, 2.0, 2); }

MetricField conformal_abs() {
  return make_conformal(Expr::parse("1 + abs(x1)"), box22(), {Regularity::Lipschitz, 1.0},
                        "one-plus-abs");
}

}  // namespace

TEST_CASE("build_metric: euclidean evaluates to the identity") {
  MetricField f = build_metric(nlohmann::json{
      {"kind", "euclidean"}, {"dim", 2}, {"domain", {{"min", {-2.0, -2.0}}, {"max", {2.0, 2.0}}}}});
  SplitMix64 rng(7);
  for (int i = 0; i < 50; ++i) {
    Mat g = f.eval(rng.point_in(f.domain));
    CHECK(g.at(0, 0) == 1.0);
    CHECK(g.at(1, 1) == 1.0);
    CHECK(g.at(0, 1) == 0.0);
  }
}

TEST_CASE("build_metric: conformal omega hand table") {
  MetricField f = conformal_abs();
  // hand-evaluated omega^2 = (1+|x1|)^2 at ten points
  const struct {
    double x1, x2, g11;
  } table[] = {
      {-1.5, 0.0, 6.25},    {0.0, 0.5, 1.0},     {0.5, -0.5, 2.25}, {1.0, 1.0, 4.0},
      {-0.25, 1.5, 1.5625}, {0.75, 0.2, 3.0625}, {1.9, -1.9, 8.41}, {-0.1, -0.3, 1.21},
      {1.25, 0.0, 5.0625},  {-1.0, 1.0, 4.0},
  };
  for (const auto& row : table) {
    Mat g = f.eval(Vec(row.x1, row.x2));
    CHECK(g.at(0, 0) == doctest::Approx(row.g11).epsilon(1e-14));
    CHECK(g.at(1, 1) == doctest::Approx(row.g11).epsilon(1e-14));
    CHECK(g.at(0, 1) == 0.0);
  }
}

TEST_CASE("build_metric: indefinite constant matrix is rejected") {
  nlohmann::json spec{{"kind", "constant"},
                      {"dim", 2},
                      {"domain", {{"min", {-1.0, -1.0}}, {"max", {1.0, 1.0}}}},
                      {"entries", {{1.0, 0.0}, {0.0, -1.0}}}};
  CHECK_THROWS_AS(build_metric(spec), SpdError);
}

TEST_CASE("build_metric: malformed expression passes the parse error through") {
  nlohmann::json spec{{"kind", "conformal"},
                      {"dim", 2},
                      {"domain", {{"min", {-1.0, -1.0}}, {"max", {1.0, 1.0}}}},
                      {"omega", "1 + * x1"}};
  CHECK_THROWS_AS(build_metric(spec), ParseError);
}

TEST_CASE("metric_norm examples") {
  MetricField eucl = make_euclidean(2, box22());
  CHECK(metric_norm(eucl, Vec(0, 0), Vec(3, 4)) == doctest::Approx(5.0).epsilon(1e-14));

  MetricField diag49 = make_constant(Mat::diag({4.0, 9.0}), box22());
  CHECK(metric_norm(diag49, Vec(0.1, 0.1), Vec(1, 0)) == doctest::Approx(2.0).epsilon(1e-14));

  MetricField expm = make_conformal(Expr::parse("exp(x1)"), box22(), {Regularity::Smooth, 1.0});
  CHECK(metric_norm(expm, Vec(0.5, 0.0), Vec(1, 0)) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-13));
  // cross-check the fast path against the quadratic form
  Mat g = expm.eval(Vec(0.5, 0.0));
  CHECK(std::sqrt(g.quad(Vec(1, 0))) == doctest::Approx(std::exp(0.5)).epsilon(1e-13));

  CHECK(metric_norm(eucl, Vec(0, 0), Vec::zero(2)) == 0.0);
  CHECK_THROWS_AS(metric_norm(eucl, Vec(5, 0), Vec(1, 0)), DomainError);
}

TEST_CASE("metric_norm homogeneity") {
  MetricField f = conformal_abs();
  SplitMix64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Vec p = rng.point_in(f.domain);
    Vec v = rng.unit_vector(2) * rng.uniform(0.1, 3.0);
    double alpha = rng.uniform(-4.0, 4.0);
    double lhs = metric_norm(f, p, v * alpha);
    double rhs = std::abs(alpha) * metric_norm(f, p, v);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("comparison_bounds examples") {
  BoxDomain inner = BoxDomain::square(-1.0, 1.0, 2);

  MetricField diag49 = make_constant(Mat::diag({4.0, 9.0}), box22());
  ComparisonBounds cb = comparison_bounds(diag49, inner, 64);
  CHECK(cb.lambda0 == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(cb.mu0 == doctest::Approx(3.0).epsilon(1e-5));

  MetricField eucl = make_euclidean(2, box22());
  ComparisonBounds ce = comparison_bounds(eucl, inner, 16);
  CHECK(ce.lambda0 == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(ce.mu0 == doctest::Approx(1.0).epsilon(1e-5));

  // extremes of 1+|x1| over [-1,1]^2 are 1 (at the kink) and 2 (at the faces);
  // an odd grid samples the kink plane exactly
  ComparisonBounds ca = comparison_bounds(conformal_abs(), inner, 101);
  CHECK(ca.lambda0 == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(ca.mu0 == doctest::Approx(2.0).epsilon(1e-4));

  CHECK_THROWS_AS(comparison_bounds(eucl, inner, 1), ParamError);
}

TEST_CASE("comparison_bounds sandwich on fresh samples") {
  BoxDomain inner = BoxDomain::square(-1.0, 1.0, 2);
  for (const auto& f : {conformal_abs(), make_constant(Mat::diag({4.0, 9.0}), box22())}) {
    ComparisonBounds cb = comparison_bounds(f, inner, 101);
    SplitMix64 rng(23);
    for (int i = 0; i < 1000; ++i) {
      Vec q = rng.point_in(inner, 1e-3);
      Vec v = rng.unit_vector(2) * rng.uniform(0.5, 2.0);
      double ng = metric_norm(f, q, v);
      double ne = v.norm2();
      CHECK(cb.lambda0 * ne <= ng * (1 + 1e-12));
      CHECK(ng <= cb.mu0 * ne * (1 + 1e-12));
    }
  }
}

TEST_CASE("pointwise_factor_pair examples and chain") {
  BoxDomain inner = BoxDomain::square(-1.0, 1.0, 2);
  MetricField eucl = make_euclidean(2, box22());
  MetricField four = make_constant(Mat::diag({4.0, 4.0}), box22());

  FactorPair p1 = pointwise_factor_pair(four, eucl, inner, 33);
  CHECK(p1.c == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(p1.C == doctest::Approx(2.0).epsilon(1e-5));

  FactorPair p2 = pointwise_factor_pair(eucl, eucl, inner, 33);
  CHECK(p2.c == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(p2.C == doctest::Approx(1.0).epsilon(1e-5));

  FactorPair p3 = pointwise_factor_pair(conformal_abs(), eucl, inner, 101);
  CHECK(p3.c == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(p3.C == doctest::Approx(2.0).epsilon(1e-4));

  // chain property on fresh samples
  MetricField g = conformal_abs();
  SplitMix64 rng(37);
  for (int i = 0; i < 1000; ++i) {
    Vec q = rng.point_in(inner, 1e-3);
    Vec v = rng.unit_vector(2);
    double ng = metric_norm(g, q, v), nh = metric_norm(eucl, q, v);
    CHECK(p3.c * nh <= ng * (1 + 1e-12));
    CHECK(ng <= p3.C * nh * (1 + 1e-12));
  }
}

TEST_CASE("symmetry invariant on random points") {
  MetricField f = make_matrix_field(
      {{Expr::parse("2 + x2^2"), Expr::parse("0.5*x1")},
       {Expr::parse("0.5*x1"), Expr::parse("3 + x1^2")}},
      box22(), {Regularity::Smooth, 1.0}, "full-matrix");
  SplitMix64 rng(41);
  for (int i = 0; i < 1000; ++i) {
    Mat g = f.eval(rng.point_in(f.domain));
    CHECK(max_asymmetry(g) <= 1e-12);
    CHECK(is_spd(g));
  }
}

TEST_CASE("jacobi eigenvalues for dim 3 satisfy the characteristic polynomial") {
  Mat m = Mat::zero(3);
  m.at(0, 0) = 4.0;  m.at(0, 1) = 1.0;   m.at(0, 2) = 0.5;
  m.at(1, 0) = 1.0;  m.at(1, 1) = 3.0;   m.at(1, 2) = -0.75;
  m.at(2, 0) = 0.5;  m.at(2, 1) = -0.75; m.at(2, 2) = 5.0;
  auto ev = sym_eigenvalues(m);
  CHECK(ev[0] + ev[1] + ev[2] == doctest::Approx(12.0).epsilon(1e-12));
  double det = 4.0 * (3.0 * 5.0 - 0.5625) - 1.0 * (1.0 * 5.0 + 0.75 * 0.5) +
               0.5 * (-0.75 - 3.0 * 0.5);
  CHECK(ev[0] * ev[1] * ev[2] == doctest::Approx(det).epsilon(1e-12));
  CHECK(ev[0] <= ev[1]);
  CHECK(ev[1] <= ev[2]);
  for (int i = 0; i < 3; ++i) {
    double l = ev[static_cast<std::size_t>(i)];
    double c0 = (4 - l) * ((3 - l) * (5 - l) - 0.5625) -
                1.0 * (1.0 * (5 - l) + 0.75 * 0.5) + 0.5 * (-0.75 - (3 - l) * 0.5);
    CHECK(std::abs(c0) < 1e-9);
  }
}

TEST_CASE("generalized eigen range via cholesky") {
  Mat h = Mat::zero(3);
  h.at(0, 0) = 2.0; h.at(1, 1) = 1.0; h.at(2, 2) = 0.5;
  Mat g = Mat::zero(3);
  g.at(0, 0) = 4.0; g.at(1, 1) = 9.0; g.at(2, 2) = 1.0;
  // H^{-1} G is diagonal with entries 2, 9, 2
  EigenRange r = generalized_eigen_range(g, h);
  CHECK(r.min == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.max == doctest::Approx(9.0).epsilon(1e-12));
  CHECK_THROWS_AS(cholesky(Mat::diag({1.0, -1.0})), SpdError);
}

TEST_CASE("domain invariants") {
  CHECK_THROWS_AS(BoxDomain(Vec(1.0, 0.0), Vec(0.0, 1.0)), std::invalid_argument);
  MetricField f = conformal_abs();
  CHECK_THROWS_AS(f.eval(Vec(2.0, 0.0)), DomainError);  // boundary is outside
  CHECK_THROWS_AS(f.eval(Vec(0.0, -3.0)), DomainError);
  CHECK_THROWS_AS(build_metric(nlohmann::json{{"kind", "nonsense"}}), ParamError);
}
