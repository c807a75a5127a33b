#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lowreg/curve.hpp"
#include "lowreg/distance.hpp"
#include "lowreg/metric_field.hpp"
#include "lowreg/quadrature.hpp"

namespace lowreg {

struct Partition {
  std::vector<double> breakpoints;  // strictly increasing, 0 and 1 fixed
};

struct RefinementLevel {
  int depth = 0;
  std::size_t chordCount = 0;
  double chordSum = 0;
  Partition partition;
};

struct RefinementTrace {
  std::vector<RefinementLevel> levels;
};

struct RefinementConfig {
  double tol = 1e-4;       // stop when the level increment falls below
  int maxDepth = 14;
  int minDepth = 4;        // increment rule only applies from here (symmetric
                           // curves can produce collinear midpoints early)
  double chordTol = 1e-9;  // per-chord distance tolerance (slack in checks)
};

struct LengthResult {
  double value = 0;
  double estimatedError = 0;
  long long evaluations = 0;
  double undefinedFraction = 0;  // quadrature nodes with no usable derivative
  bool nonAcWarning = false;
  std::vector<std::string> warnings;
  std::optional<RefinementTrace> trace;
};

/// Default quadrature tolerance by regularity: 1e-9 for smooth fields, 1e-6
/// for merely continuous ones.
QuadratureConfig default_quadrature(const MetricField& f);

/// Arc length: adaptive quadrature of the metric speed, split at the curve's
/// knots. A derivative undefined at more than 0.1% of nodes attaches a non-AC
/// warning; the value is still returned.
LengthResult arc_length(const MetricField& f, const Curve& c);
LengthResult arc_length(const MetricField& f, const Curve& c, QuadratureConfig quad);

/// Induced (polygonal) length: chord sums over nested dyadic refinement
/// anchored at the curve's knots, stopping when the increment drops below
/// cfg.tol or at cfg.maxDepth. Chord sums must not decrease beyond the
/// per-chord slack; the trace records every level.
LengthResult induced_length(const DistanceMap& d, const Curve& c, RefinementConfig cfg = {});

/// Profile t -> L_d(curve restricted to [0,t]) through one shared refinement;
/// ts must be sorted within [0,1]. Nondecreasing by construction.
std::vector<double> induced_length_profile(const DistanceMap& d, const Curve& c,
                                           const std::vector<double>& ts,
                                           RefinementConfig cfg = {});

struct MetricDerivativeConfig {
  double delta0 = 1e-2;
  int halvings = 8;
  bool extrapolate = true;       // Richardson on the last two estimates
  double convergeRelTol = 1e-3;  // two-sided averages must settle to this
  double sidedRelTol = 1e-2;     // and the two sides must agree to this
};

struct MetricDerivativeResult {
  double value = 0;
  bool converged = false;
  long long evaluations = 0;
};

/// Metric derivative at t: two-sided difference quotients of d along a
/// geometric delta schedule, sides averaged, optional Richardson step.
MetricDerivativeResult metric_derivative(const DistanceMap& d, const Curve& c, double t,
                                         const MetricDerivativeConfig& cfg = {});

/// Metric arc-length: fixed composite quadrature of the metric-derivative
/// estimator (panel count doubles until the quad tolerance is met). Nodes
/// whose quotient has not converged are treated as the declared null set and
/// excluded from their panel's average; more than 1% of them is an error.
LengthResult metric_arc_length(const DistanceMap& d, const Curve& c, QuadratureConfig quad,
                               const MetricDerivativeConfig& deriv);

struct VariationalConfig {
  int supSamples = 1024;
  int refineTop = 3;       // golden-section refinement around the largest samples
  double acThreshold = 0.999;
};

/// Variational distance: sup_t d(a(t), b(t)) plus the L1 distance between the
/// metric speeds. Both curves must pass the AC screen.
double variational_distance(const MetricField& f, const Curve& a, const Curve& b,
                            const DistanceMap& d, QuadratureConfig quad = {},
                            const VariationalConfig& vcfg = {});

}  // namespace lowreg
