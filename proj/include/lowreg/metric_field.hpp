#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "lowreg/expression.hpp"
#include "lowreg/linalg.hpp"
#include "lowreg/types.hpp"

namespace lowreg {

enum class Regularity { Smooth, Lipschitz, Hoelder, Continuous };

struct RegularityTag {
  Regularity kind = Regularity::Continuous;
  double alpha = 1.0;  // Hoelder exponent when kind == Hoelder
};

std::string to_string(const RegularityTag& r);
RegularityTag regularity_from_string(const std::string& s, double alpha = 1.0);

/// A symmetric positive-definite matrix field on an open box. Evaluation
/// checks the domain, symmetry (1e-12) and positive definiteness at every
/// queried point. Conformal fields carry a scalar fast path omega with
/// g = omega^2 * I.
struct MetricField {
  BoxDomain domain;
  RegularityTag regularity;
  std::string name = "metric";

  std::function<Mat(const Vec&)> matrix_fn;
  std::function<double(const Vec&)> omega_fn;     // set iff conformal
  std::optional<Mat> constant_matrix;             // set iff constant in space

  Mat eval(const Vec& p) const;
  bool is_conformal() const { return static_cast<bool>(omega_fn); }
  void require_inside(const Vec& p) const;
};

/// sqrt(v^T G(p) v); zero iff v = 0.
double metric_norm(const MetricField& f, const Vec& p, const Vec& v);

struct ComparisonBounds {
  double lambda0 = 0;  // lower factor vs the Euclidean norm
  double mu0 = 0;      // upper factor
  int gridRes = 0;
};

/// Grid extrema of the eigenvalue square roots over `box`, widened outward by
/// the relative safety factor.
ComparisonBounds comparison_bounds(const MetricField& f, const BoxDomain& box, int gridRes = 64,
                                   double safety = 1e-6);

struct FactorPair {
  double c = 0, C = 0;
  int gridRes = 0;
};

/// c,C with c*|v|_h <= |v|_g <= C*|v|_h over `box`, from extremal generalized
/// eigenvalues of H^{-1} G on the grid.
FactorPair pointwise_factor_pair(const MetricField& g, const MetricField& h, const BoxDomain& box,
                                 int gridRes = 64, double safety = 1e-6);

// Builders. All verify SPD on a coarse sample grid and reject with the
// offending point otherwise.
MetricField make_euclidean(int dim, const BoxDomain& box, std::string name = "euclidean");
MetricField make_constant(const Mat& g, const BoxDomain& box, std::string name = "constant");
MetricField make_conformal(const Expr& omega, const BoxDomain& box,
                           RegularityTag reg = {Regularity::Continuous, 1.0},
                           std::string name = "conformal");
MetricField make_matrix_field(const std::vector<std::vector<Expr>>& entries, const BoxDomain& box,
                              RegularityTag reg = {Regularity::Continuous, 1.0},
                              std::string name = "matrix");

/// Same evaluator restricted to a sub-box.
MetricField restrict_domain(const MetricField& f, const BoxDomain& box);

/// Build from a MetricSpec JSON record (kinds: euclidean, constant, conformal,
/// matrix, sampled-grid).
MetricField build_metric(const nlohmann::json& spec);
MetricField load_metric_file(const std::string& path);

BoxDomain box_from_json(const nlohmann::json& j);
nlohmann::json box_to_json(const BoxDomain& b);

}  // namespace lowreg
