#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "lowreg/approx.hpp"
#include "lowreg/curve.hpp"
#include "lowreg/distance.hpp"
#include "lowreg/length.hpp"
#include "lowreg/metric_field.hpp"
#include "lowreg/mollify.hpp"
#include "lowreg/report.hpp"
#include "lowreg/suites.hpp"

using namespace lowreg;

namespace {

Vec parse_point(const std::string& s) {
  std::vector<double> xs;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    xs.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return Vec::from(xs);
}

nlohmann::json length_record(const LengthResult& r) {
  nlohmann::json j{{"value", r.value},
                   {"estimatedError", r.estimatedError},
                   {"evaluations", r.evaluations}};
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"length structures of low-regularity Riemannian metrics on box domains"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  std::string outPath, format = "json";
  app.add_option("--seed", seed, "seed for all randomized sampling")->capture_default_str();
  app.add_option("--out", outPath, "output file (reports, traces, emitted specs)");
  app.add_option("--format", format, "output format: json or csv")->capture_default_str();

  std::string metricPath, curvePath, curveBPath, metricBPath;
  double tol = 0;
  int depth = 14, gridRes = 64, points = 33, levels = 2, targetN = 10, pairs = 20;
  double tParam = 0.5, eta = 1e-2;
  std::string fromStr, toStr, suiteName = "all";
  bool timings = false;

  auto* length = app.add_subcommand("length", "arc length of a curve under a metric");
  length->add_option("--metric", metricPath)->required();
  length->add_option("--curve", curvePath)->required();
  length->add_option("--tol", tol, "quadrature absolute tolerance");

  auto* induced = app.add_subcommand("induced-length", "polygonal length from the solver distance");
  induced->add_option("--metric", metricPath)->required();
  induced->add_option("--curve", curvePath)->required();
  induced->add_option("--depth", depth, "maximum refinement depth")->capture_default_str();

  auto* dist = app.add_subcommand("distance", "intrinsic distance between two points");
  dist->add_option("--metric", metricPath)->required();
  dist->add_option("--from", fromStr, "start point x,y")->required();
  dist->add_option("--to", toStr, "end point x,y")->required();
  dist->add_option("--grid", gridRes)->capture_default_str();
  dist->add_option("--points", points)->capture_default_str();
  dist->add_option("--levels", levels)->capture_default_str();

  auto* dac = app.add_subcommand("dac", "variational distance between two curves");
  dac->add_option("--metric", metricPath)->required();
  dac->add_option("--curve-a", curvePath)->required();
  dac->add_option("--curve-b", curveBPath)->required();

  auto* mol = app.add_subcommand("mollify", "smooth a continuous metric with the sandwich target");
  mol->add_option("--metric", metricPath)->required();
  mol->add_option("--target-n", targetN)->required();
  mol->add_option("--grid", gridRes)->capture_default_str();

  auto* mder = app.add_subcommand("metric-derivative", "metric derivative of a curve at t");
  mder->add_option("--metric", metricPath)->required();
  mder->add_option("--curve", curvePath)->required();
  mder->add_option("--t", tParam)->required();

  auto* approx = app.add_subcommand("approximate", "piecewise-smooth approximation lambda_eta");
  approx->add_option("--metric", metricPath)->required();
  approx->add_option("--curve", curvePath)->required();
  approx->add_option("--eta", eta)->required();

  auto* equiv = app.add_subcommand("equivalence", "empirical equivalence constants of two metrics");
  equiv->add_option("--metric-a", metricPath)->required();
  equiv->add_option("--metric-b", metricBPath)->required();
  equiv->add_option("--pairs", pairs)->capture_default_str();

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suiteName, "suite name or 'all'")->capture_default_str();
  verify->add_flag("--timings", timings, "emit real wall times (breaks byte-stability)");

  auto* reportCmd = app.add_subcommand("report", "reformat a saved JSON report");
  std::string reportIn;
  reportCmd->add_option("--in", reportIn, "report JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (length->parsed()) {
      MetricField m = load_metric_file(metricPath);
      Curve c = load_curve_file(curvePath);
      QuadratureConfig q = default_quadrature(m);
      if (tol > 0) q.absTol = tol;
      LengthResult r = arc_length(m, c, q);
      std::cout << length_record(r).dump(2) << "\n";
      return 0;
    }
    if (induced->parsed()) {
      MetricField m = load_metric_file(metricPath);
      Curve c = load_curve_file(curvePath);
      RefinementConfig cfg;
      cfg.maxDepth = depth;
      cfg.chordTol = 1e-4;
      LengthResult r = induced_length(default_distance_map(m), c, cfg);
      std::cout << length_record(r).dump(2) << "\n";
      if (!outPath.empty() && r.trace) {
        std::vector<std::array<double, 3>> rows;
        for (const auto& lv : r.trace->levels)
          rows.push_back({static_cast<double>(lv.depth), static_cast<double>(lv.chordCount),
                          lv.chordSum});
        std::ofstream out(outPath, std::ios::binary);
        if (!out) throw Error("cannot open '" + outPath + "' for writing");
        emit_trace_csv(rows, out);
      }
      return 0;
    }
    if (dist->parsed()) {
      MetricField m = load_metric_file(metricPath);
      DistanceConfig cfg;
      cfg.gridRes = gridRes;
      cfg.polylinePoints = points;
      cfg.levels = levels;
      DistanceResult r = distance(m, parse_point(fromStr), parse_point(toStr), cfg);
      nlohmann::json path = nlohmann::json::array();
      for (const auto& p : r.path) path.push_back(p.to_vector());
      std::cout << nlohmann::json{{"value", r.value},
                                  {"errorEstimate", r.errorEstimate},
                                  {"iterations", r.iterations},
                                  {"path", path}}
                       .dump(2)
                << "\n";
      return 0;
    }
    if (dac->parsed()) {
      MetricField m = load_metric_file(metricPath);
      Curve a = load_curve_file(curvePath), b = load_curve_file(curveBPath);
      double v = variational_distance(m, a, b, default_distance_map(m), default_quadrature(m));
      std::cout << nlohmann::json{{"value", v}}.dump(2) << "\n";
      return 0;
    }
    if (mol->parsed()) {
      MetricField m = load_metric_file(metricPath);
      MollifiedMetric r = mollify_metric(m, targetN, gridRes, seed);
      nlohmann::json spec = sampled_grid_to_json(r);
      if (outPath.empty()) throw ParamError("mollify: --out is required");
      write_text(outPath, spec.dump());
      std::cout << nlohmann::json{{"kernelWidth", r.kernelWidth},
                                  {"targetIndex", r.targetIndex},
                                  {"effectiveDomain", box_to_json(r.effectiveDomain)},
                                  {"out", outPath}}
                       .dump(2)
                << "\n";
      return 0;
    }
    if (mder->parsed()) {
      MetricField m = load_metric_file(metricPath);
      Curve c = load_curve_file(curvePath);
      auto r = metric_derivative(default_distance_map(m), c, tParam, {});
      std::cout << nlohmann::json{{"value", r.value}, {"converged", r.converged}}.dump(2) << "\n";
      return 0;
    }
    if (approx->parsed()) {
      MetricField m = load_metric_file(metricPath);
      Curve c = load_curve_file(curvePath);
      // one chart box: the metric's domain, slightly shrunk
      std::vector<BoxDomain> cover{m.domain.shrunk(1e-6 * m.domain.min_extent())};
      SmoothApproxResult r = smooth_approximation(m, c, eta, cover);
      if (!outPath.empty()) write_text(outPath, curve_to_polyline_json(r.curve).dump());
      std::cout << nlohmann::json{{"eta", r.eta},
                                  {"chartCount", r.chartCount},
                                  {"dacBound", r.dacBound},
                                  {"dacMeasured", r.dacMeasured},
                                  {"out", outPath}}
                       .dump(2)
                << "\n";
      return 0;
    }
    if (equiv->parsed()) {
      MetricField a = load_metric_file(metricPath);
      MetricField b = load_metric_file(metricBPath);
      BoxDomain box = a.domain.contains_box(b.domain) ? b.domain : a.domain;
      EquivalenceReport r = empirical_equivalence(a, b, box, pairs, {}, seed);
      std::cout << nlohmann::json{{"cEmp", r.cEmp},
                                  {"CEmp", r.CEmp},
                                  {"band", {r.bandLo, r.bandHi}},
                                  {"pass", r.pass},
                                  {"skipped", r.skipped}}
                       .dump(2)
                << "\n";
      return 0;
    }
    if (verify->parsed()) {
      SuiteConfig cfg;
      cfg.seed = seed;
      cfg.timings = timings;
      VerificationReport rep = run_suite(suiteName, cfg);
      for (const auto& c : rep.cases)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.suite << ": " << c.name
                  << "  observed=" << c.observed << " expected=" << c.expected
                  << " tol=" << c.tolerance << "\n";
      int failures = 0;
      for (const auto& c : rep.cases)
        if (!c.pass) ++failures;
      std::cout << rep.cases.size() - static_cast<std::size_t>(failures) << "/" << rep.cases.size()
                << " cases passed\n";
      if (!outPath.empty()) emit_report_file(rep, format, outPath);
      return failures == 0 ? 0 : 1;
    }
    if (reportCmd->parsed()) {
      std::ifstream in(reportIn);
      if (!in) throw Error("cannot open '" + reportIn + "'");
      nlohmann::json j;
      in >> j;
      VerificationReport rep = report_from_json(j);
      if (outPath.empty())
        emit_report(rep, format, std::cout);
      else
        emit_report_file(rep, format, outPath);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
