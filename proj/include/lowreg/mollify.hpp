#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "lowreg/metric_field.hpp"
#include "lowreg/types.hpp"

namespace lowreg {

struct DistanceConfig;  // distance.hpp

/// Uniform sample grid of metric components (upper triangle, one array per
/// component, row-major with axis 0 fastest).
struct GridSpec {
  int dim = 0;
  std::array<int, 3> res{0, 0, 0};  // nodes per axis
  Vec origin;
  Vec spacing;
};

struct MollifiedMetric {
  MetricField field;  // interpolated smoothed field; domain == effectiveDomain
  double kernelWidth = 0;
  int targetIndex = 0;
  GridSpec grid;
  BoxDomain effectiveDomain;
  std::string baseName;
  std::vector<std::vector<double>> components;  // smoothed samples, upper triangle order
};

/// Convolve the sampled components with the normalized compact bump kernel
/// rho(x) ~ (1 - |x/eps|^2)^4 and interpolate with tensor-product cubics.
/// The effective domain shrinks by eps plus the interpolation margin.
MollifiedMetric mollify_with_width(const MetricField& base, double eps, int gridRes);

/// Largest kernel width (bisection) whose norm ratios stay strictly inside
/// [(n-1)/n, (n+1)/n] on a seeded 1000-sample check; ResolutionError when even
/// the smallest width fails.
MollifiedMetric mollify_metric(const MetricField& base, int targetIndex, int gridRes = 64,
                               std::uint64_t seed = 42, int samples = 1000);

/// Norm-ratio extremes |v|_{g_n} / |v|_g over seeded samples of (q, v).
struct RatioRange {
  double lo = 0, hi = 0;
};
RatioRange norm_ratio_range(const MetricField& base, const MetricField& smoothed,
                            const BoxDomain& box, std::uint64_t seed, int samples);

struct MollifyDistanceReport {
  struct Row {
    Vec p, q;
    double d = 0, dn = 0, ratio = 0, slack = 0;
    bool pass = false;
  };
  std::vector<Row> rows;
  double bandLo = 0, bandHi = 0;  // before per-pair slack widening
  bool pass = false;
};

/// d vs d_n per pair, both solved on the effective domain; each ratio must lie
/// in [(n-1)/n, (n+1)/n] widened by 3x the combined relative solver error.
MollifyDistanceReport mollified_distance_check(const MetricField& base, const MollifiedMetric& mol,
                                               const std::vector<std::pair<Vec, Vec>>& pairs,
                                               const DistanceConfig& cfg);

nlohmann::json sampled_grid_to_json(const MollifiedMetric& mol);
MetricField sampled_grid_from_json(const nlohmann::json& spec);

}  // namespace lowreg
