#include "lowreg/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace lowreg {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (positive half).
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};

}  // namespace

double gk15(const std::function<double(double)>& f, double a, double b, long long* evals) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = kWgk[7] * f(mid);
  for (int i = 0; i < 7; ++i) {
    double dx = half * kXgk[i];
    acc += kWgk[i] * (f(mid - dx) + f(mid + dx));
  }
  if (evals) *evals += 15;
  return acc * half;
}

std::vector<double> gk15_nodes(double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::vector<double> ts;
  ts.reserve(15);
  for (int i = 0; i < 7; ++i) ts.push_back(mid - half * kXgk[i]);
  ts.push_back(mid);
  for (int i = 6; i >= 0; --i) ts.push_back(mid + half * kXgk[i]);
  return ts;
}

namespace {

struct Adaptive {
  const std::function<double(double)>& f;
  int maxDepth;
  double value = 0, err = 0;
  long long evals = 0;

  void piece(double a, double b, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double left = gk15(f, a, m, &evals);
    double right = gk15(f, m, b, &evals);
    double diff = std::abs(whole - (left + right));
    if (diff <= tol || depth >= maxDepth || (b - a) < 1e-14) {
      value += left + right;
      err += diff;
      return;
    }
    piece(a, m, left, 0.5 * tol, depth + 1);
    piece(m, b, right, 0.5 * tol, depth + 1);
  }
};

std::vector<double> piece_edges(double a, double b, const std::vector<double>& splits) {
  std::vector<double> edges{a};
  for (double s : splits)
    if (s > a + 1e-15 && s < b - 1e-15) edges.push_back(s);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-15; }),
              edges.end());
  return edges;
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              const std::vector<double>& splits, QuadratureConfig cfg) {
  auto edges = piece_edges(a, b, splits);
  Adaptive ad{f, cfg.maxDepth};
  const double total = b - a;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double lo = edges[i], hi = edges[i + 1];
    double whole = gk15(f, lo, hi, &ad.evals);
    ad.piece(lo, hi, whole, cfg.absTol * (hi - lo) / total, 0);
  }
  return {ad.value, ad.err, ad.evals};
}

QuadResult integrate_panels(const std::function<double(double)>& f, double a, double b,
                            const std::vector<double>& splits, int panelsPerPiece) {
  auto edges = piece_edges(a, b, splits);
  QuadResult r;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double lo = edges[i], hi = edges[i + 1];
    double h = (hi - lo) / panelsPerPiece;
    for (int k = 0; k < panelsPerPiece; ++k)
      r.value += gk15(f, lo + k * h, lo + (k + 1) * h, &r.evaluations);
  }
  return r;
}

}  // namespace lowreg
