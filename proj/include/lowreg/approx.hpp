#pragma once

#include <vector>

#include "lowreg/curve.hpp"
#include "lowreg/length.hpp"
#include "lowreg/metric_field.hpp"

namespace lowreg {

struct DerivativeEqualityReport {
  struct Row {
    double t = 0;
    double metricSide = 0;    // |gamma-dot|(t)
    double analyticSide = 0;  // |gamma'(t)|_g
    bool converged = false;
  };
  std::vector<Row> rows;
  double maxDiff = 0, meanDiff = 0;
  double maxExcess = 0;  // max of metricSide - analyticSide (minimality check)
  bool pass = false;     // maxDiff < 1e-2
};

/// Compares the metric derivative against the analytic speed at the given
/// times; the distance map is the solver-backed map of the field.
DerivativeEqualityReport derivative_equality_report(const MetricField& f, const Curve& c,
                                                    const std::vector<double>& ts,
                                                    const MetricDerivativeConfig& cfg = {});

struct SmoothApproxConfig {
  int oscGridMin = 4096;     // window-scan resolution (auto-scales with eta)
  double etaSafety = 0.9;    // enforce the eta bounds with this margin
  int checkGrid = 512;       // samples for the uniform / L1 mollifier checks
  int maxEpsHalvings = 40;
  int supSamples = 1024;     // for the D_ac measurement
};

struct SmoothApproxResult {
  Curve curve;            // lambda_eta, piecewise smooth, knots at the joins
  double eta = 0;
  int chartCount = 0;     // N: pieces of [0,1] assigned to cover boxes
  double dacBound = 0;    // 10 * N * eta
  double dacMeasured = 0;
  double delta = 0;       // join half-width actually used (last piece)
  double epsilon = 0;     // mollifier width actually used (last piece)
};

/// Piecewise-smooth approximation of an AC curve: per cover piece, choose a
/// join width delta with small speed-integral and coordinate oscillation over
/// 2*delta windows, mollify the components with a shrinking kernel until the
/// uniform and L1-derivative deviations drop below eta, and attach straight
/// joins that land exactly on the original endpoints.
SmoothApproxResult smooth_approximation(const MetricField& f, const Curve& gamma, double eta,
                                        const std::vector<BoxDomain>& chartBoxes,
                                        const SmoothApproxConfig& cfg = {});

}  // namespace lowreg
