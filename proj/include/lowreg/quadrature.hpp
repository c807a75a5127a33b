#pragma once

#include <functional>
#include <vector>

#include "lowreg/types.hpp"

namespace lowreg {

struct QuadratureConfig {
  double absTol = 1e-9;
  int maxDepth = 28;
};

struct QuadResult {
  double value = 0;
  double errorEstimate = 0;
  long long evaluations = 0;
};

/// 15-point Gauss-Kronrod rule on [a,b].
double gk15(const std::function<double(double)>& f, double a, double b, long long* evals = nullptr);

/// Adaptive bisection; an interval is accepted when the whole-interval rule
/// and the sum over its halves agree within the interval's tolerance share.
/// Splits first at the supplied breakpoints (deduplicated, clipped to (a,b)).
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              const std::vector<double>& splits, QuadratureConfig cfg = {});

/// Fixed composite rule: panels per piece between consecutive breakpoints.
QuadResult integrate_panels(const std::function<double(double)>& f, double a, double b,
                            const std::vector<double>& splits, int panelsPerPiece);

/// The 15 Kronrod abscissae mapped to [a,b]; used by samplers that must agree
/// with the quadrature node layout.
std::vector<double> gk15_nodes(double a, double b);

}  // namespace lowreg
