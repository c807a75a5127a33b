#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lowreg/metric_field.hpp"
#include "lowreg/types.hpp"

namespace lowreg {

using DistanceMap = std::function<double(const Vec&, const Vec&)>;

struct DistanceConfig {
  int gridRes = 64;        // lattice nodes per axis for the Dijkstra initializer
  int polylinePoints = 33; // vertices of the descent polyline
  int maxIters = 500;      // descent budget per refinement level
  double stepTol = 1e-8;   // stop when the discrete length decrease falls below
  double fdStep = 1e-6;    // central-difference step for the length gradient
  int levels = 2;          // refinement ladder; vertex count doubles per level
  double quadTol = 1e-9;   // final re-measurement tolerance
};

struct DistanceResult {
  double value = 0;
  double errorEstimate = 0;
  std::vector<Vec> path;
  int iterations = 0;
  bool stalled = false;
  std::vector<double> descentTrace;  // accepted discrete lengths, nonincreasing
};

/// Shortest path on the 8-connected (n=2) / 26-connected (n=3) lattice over
/// the field's domain; edge weight is the metric norm of the edge vector at
/// its midpoint. Returns the lattice path as a polyline. Upper bound of the
/// intrinsic distance up to lattice anisotropy.
DistanceResult grid_distance(const MetricField& f, const Vec& p, const Vec& q, int gridRes = 64);

/// Descent on the discrete polyline length (midpoint-rule segment weights),
/// endpoints fixed, gradient by central differences, backtracking halving.
/// The discrete length is nonincreasing across accepted steps; the returned
/// value is the polyline's arc length re-measured at quadrature accuracy.
DistanceResult refine_polyline(const MetricField& f, std::vector<Vec> path,
                               const DistanceConfig& cfg);

/// Full pipeline: lattice initializer, polyline descent, vertex-doubling
/// ladder, straight-chord candidate. The value is the best measured candidate
/// and never exceeds the chord's arc length.
DistanceResult distance(const MetricField& f, const Vec& p, const Vec& q,
                        const DistanceConfig& cfg = {});

struct ChordMapConfig {
  int points = 7;
  int maxIters = 60;
  double stepTol = 1e-10;
  double fdStep = 1e-7;
  double quadTol = 1e-10;
  bool adaptivePoints = true;  // more vertices and a second level for far pairs
};

/// Distance map backed by chord-started descent (exact closed form for
/// constant metrics, where the straight chord is optimal). Symmetric by
/// endpoint canonicalization; d(p,p) = 0 exactly.
DistanceMap default_distance_map(const MetricField& f, const ChordMapConfig& cfg = {});

/// Euclidean distance map (the exact intrinsic metric of the identity field).
DistanceMap euclidean_map();

struct AxiomCheck {
  std::string name;
  double worstMargin = 0;  // >= 0 means the check holds
  int violations = 0;
  int checked = 0;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  bool pass = true;
};

/// d(p,p)=0, symmetry within 2x errorEstimate, triangle within 3x, and the
/// lambda0 |p-q| <= d <= chord-arc-length sandwich, over all pairs/triples of
/// the sample.
AxiomReport verify_metric_axioms(const MetricField& f, const std::vector<Vec>& points,
                                 const DistanceConfig& cfg = {});

struct EquivalenceReport {
  double cEmp = 0, CEmp = 0;     // empirical ratio extremes d_g / d_h
  double bandLo = 0, bandHi = 0; // a-priori band (widened by solver slack)
  bool pass = false;             // all ratios inside the band
  int used = 0, skipped = 0;
  std::vector<double> ratios;
};

/// Ratio extremes of d_g/d_h over seeded point pairs, checked against the
/// pointwise factor band. Pairs closer than the solver resolution are skipped
/// and counted.
EquivalenceReport empirical_equivalence(const MetricField& g, const MetricField& h,
                                        const BoxDomain& box, int pairs, const DistanceConfig& cfg,
                                        std::uint64_t seed);

/// Distance-map variant on an interval, sampling pairs at geometrically
/// shrinking separations. With no explicit band, metrics are declared
/// non-equivalent when the ratio spread exceeds `spreadFactor`.
struct MapEquivalenceConfig {
  int scales = 6;            // separations 10^-1 .. 10^-scales
  int pairsPerScale = 4;
  double spreadFactor = 10.0;
  std::optional<std::pair<double, double>> band;
};
EquivalenceReport empirical_equivalence_maps(const DistanceMap& dg, const DistanceMap& dh,
                                             const BoxDomain& interval,
                                             const MapEquivalenceConfig& cfg, std::uint64_t seed);

}  // namespace lowreg
