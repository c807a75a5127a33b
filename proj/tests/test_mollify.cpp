#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lowreg/distance.hpp"
#include "lowreg/mollify.hpp"
#include "lowreg/rng.hpp"

using namespace lowreg;

namespace {

BoxDomain box22() { return BoxDomain::square(-2.0, 2.0, 2); }

MetricField abs_metric() {
  return make_conformal(Expr::parse("1 + abs(x1)"), box22(), {Regularity::Lipschitz, 1.0},
                        "one-plus-abs");
}

// Independent oracle: 2-D Riemann sum of the normalized bump convolution of
// g11(x) = (1+|x1|)^2 at the origin, 100x100 nodes over the kernel support.
double convolution_oracle(double eps, int n = 100) {
  double num = 0, den = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double sx = -eps + (2.0 * eps) * (i + 0.5) / n;
      double sy = -eps + (2.0 * eps) * (j + 0.5) / n;
      double r2 = (sx * sx + sy * sy) / (eps * eps);
      if (r2 >= 1.0) continue;
      double w = std::pow(1.0 - r2, 4);
      num += w * (1.0 + std::abs(sx)) * (1.0 + std::abs(sx));
      den += w;
    }
  return num / den;
}

}  // namespace

TEST_CASE("mollify: constant metrics are fixed points of the averaging") {
  MetricField c = make_constant(Mat::diag({4.0, 9.0}), box22(), "diag49");
  MollifiedMetric mol = mollify_with_width(c, 0.3, 48);
  SplitMix64 rng(5);
  for (int i = 0; i < 200; ++i) {
    Vec q = rng.point_in(mol.effectiveDomain, 1e-6);
    Mat g = mol.field.eval(q);
    CHECK(g.at(0, 0) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(g.at(1, 1) == doctest::Approx(9.0).epsilon(1e-13));
    CHECK(g.at(0, 1) == 0.0);
    Vec v = rng.unit_vector(2);
    CHECK(metric_norm(mol.field, q, v) / metric_norm(c, q, v) ==
          doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("mollify: averaging the kink raises g11 at the origin (oracle check)") {
  MollifiedMetric mol = mollify_with_width(abs_metric(), 0.3, 128);
  double got = mol.field.eval(Vec(0.0, 0.0)).at(0, 0);
  double oracle = convolution_oracle(0.3);
  CHECK(got > 1.05);  // strictly above the raw value 1
  CHECK(got == doctest::Approx(oracle).epsilon(2e-2));
}

TEST_CASE("mollify_metric: target index 10 keeps all ratios in [0.9, 1.1]") {
  MollifiedMetric mol = mollify_metric(abs_metric(), 10, 64, 424242);
  CHECK(mol.targetIndex == 10);
  RatioRange r = norm_ratio_range(abs_metric(), mol.field, mol.effectiveDomain, 99, 1000);
  CHECK(r.lo >= 0.9 - 1e-3);
  CHECK(r.hi <= 1.1 + 1e-3);
}

TEST_CASE("mollify_metric: rejects impossible targets with a resolution error") {
  // a very coarse grid cannot certify a tight sandwich near the kink
  CHECK_THROWS_AS(mollify_metric(abs_metric(), 500, 12), ResolutionError);
}

TEST_CASE("mollified distances: euclidean base is exact, ratios = 1") {
  MetricField e = make_euclidean(2, box22());
  MollifiedMetric mol = mollify_with_width(e, 0.25, 48);
  mol.targetIndex = 10;
  SplitMix64 rng(17);
  std::vector<std::pair<Vec, Vec>> pairs;
  BoxDomain inner = BoxDomain::square(-1.0, 1.0, 2);
  for (int i = 0; i < 5; ++i) pairs.emplace_back(rng.point_in(inner), rng.point_in(inner));
  DistanceConfig cfg;
  cfg.gridRes = 32;
  MollifyDistanceReport rep = mollified_distance_check(e, mol, pairs, cfg);
  CHECK(rep.pass);
  for (const auto& row : rep.rows) CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("mollified distance ratio trend is nonincreasing in n") {
  MetricField base = abs_metric();
  SplitMix64 rng(23);
  std::vector<std::pair<Vec, Vec>> pairs;
  BoxDomain inner = BoxDomain::square(-1.0, 1.0, 2);
  for (int i = 0; i < 4; ++i) {
    Vec a = rng.point_in(inner), b = rng.point_in(inner);
    if ((b - a).norm2() < 0.2) {
      --i;
      continue;
    }
    pairs.emplace_back(a, b);
  }
  DistanceConfig cfg;
  cfg.gridRes = 32;
  cfg.polylinePoints = 17;
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {5, 10, 20}) {
    MollifiedMetric mol = mollify_metric(base, n, 64, 31337);
    MollifyDistanceReport rep = mollified_distance_check(base, mol, pairs, cfg);
    CHECK(rep.pass);
    double worst = 0;
    for (const auto& row : rep.rows) worst = std::max(worst, std::abs(row.ratio - 1.0));
    CHECK(worst <= prev + 1e-9);
    prev = worst;
  }
}

TEST_CASE("sampled-grid JSON round trip preserves the field") {
  MollifiedMetric mol = mollify_metric(abs_metric(), 5, 48, 7);
  nlohmann::json spec = sampled_grid_to_json(mol);
  MetricField back = build_metric(spec);
  CHECK(back.domain.lo[0] == doctest::Approx(mol.effectiveDomain.lo[0]).epsilon(1e-15));
  SplitMix64 rng(29);
  for (int i = 0; i < 100; ++i) {
    Vec q = rng.point_in(mol.effectiveDomain, 1e-6);
    Mat a = mol.field.eval(q);
    Mat b = back.eval(q);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) CHECK(a.at(r, c) == doctest::Approx(b.at(r, c)).epsilon(1e-12));
  }
}

TEST_CASE("mollified field keeps the conformal fast path consistent") {
  MollifiedMetric mol = mollify_metric(abs_metric(), 5, 48, 7);
  SplitMix64 rng(31);
  for (int i = 0; i < 100; ++i) {
    Vec q = rng.point_in(mol.effectiveDomain, 1e-6);
    Vec v = rng.unit_vector(2);
    double fast = metric_norm(mol.field, q, v);
    double slow = std::sqrt(mol.field.eval(q).quad(v));
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}
