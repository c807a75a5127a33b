// Serial vs OpenMP timing of the data-parallel kernels. The two modes must
// agree bitwise (checked in tests/test_parallel.cpp); this target compares
// their throughput.

#include <chrono>
#include <cstdio>
#include <functional>

#include "lowreg/curve.hpp"
#include "lowreg/distance.hpp"
#include "lowreg/length.hpp"
#include "lowreg/metric_field.hpp"
#include "lowreg/mollify.hpp"
#include "lowreg/parallel.hpp"

using namespace lowreg;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, const std::function<void()>& fn, int reps) {
  par::mode() = par::Mode::Serial;
  double serial = time_ms(fn, reps);
  par::mode() = par::Mode::OpenMP;
  double omp = time_ms(fn, reps);
  std::printf("%-34s %10.2f ms %10.2f ms %8.2fx\n", name, serial, omp, serial / omp);
}

}  // namespace

int main() {
  BoxDomain box = BoxDomain::square(-2.0, 2.0, 2);
  MetricField metric =
      make_conformal(Expr::parse("1 + abs(x1)"), box, {Regularity::Lipschitz, 1.0}, "one-plus-abs");
  Curve cantor = make_cantor_graph(60, 6);
  Curve seg = make_expr_curve({Expr::parse("-0.9 + 1.8*t"), Expr::parse("-0.6 + 1.4*t")});

  std::printf("%-34s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");
  std::printf("(workers available: %d)\n", []() {
    par::mode() = par::Mode::OpenMP;
    return par::worker_count();
  }());

  row("comparison_bounds 512x512", [&] { comparison_bounds(metric, box, 512); }, 3);

  row("mollify convolution 128x128", [&] { mollify_with_width(metric, 0.3, 128); }, 3);

  RefinementConfig rcfg;
  rcfg.tol = 0.0;
  rcfg.maxDepth = 12;
  rcfg.chordTol = 1e-12;
  row("induced_length cantor depth 12",
      [&] { induced_length(euclidean_map(), cantor, rcfg); }, 1);

  DistanceMap d = default_distance_map(metric);
  Curve other = make_expr_curve({Expr::parse("t - 0.5"), Expr::parse("0.3*sin(3*t)")});
  row("variational_distance sup scan",
      [&] { variational_distance(metric, seg, other, d, {1e-6, 20}); }, 1);

  return 0;
}
