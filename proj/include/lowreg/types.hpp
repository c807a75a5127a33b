#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lowreg {

inline constexpr int kMaxDim = 3;

/// Point / tangent vector in chart coordinates, dimension 1..3.
struct Vec {
  int dim = 0;
  std::array<double, kMaxDim> c{};

  Vec() = default;
  Vec(double x, double y) : dim(2), c{x, y, 0.0} {}
  Vec(double x, double y, double z) : dim(3), c{x, y, z} {}

  static Vec zero(int n) {
    Vec v;
    v.dim = n;
    return v;
  }
  static Vec scalar(double x) {
    Vec v;
    v.dim = 1;
    v.c[0] = x;
    return v;
  }
  static Vec from(const std::vector<double>& xs) {
    if (xs.empty() || xs.size() > kMaxDim)
      throw std::invalid_argument("Vec::from: dimension must be 1..3");
    Vec v;
    v.dim = static_cast<int>(xs.size());
    for (int i = 0; i < v.dim; ++i) v.c[static_cast<std::size_t>(i)] = xs[static_cast<std::size_t>(i)];
    return v;
  }

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Vec operator+(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r[i] += o[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r[i] -= o[i];
    return r;
  }
  Vec operator*(double s) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r[i] *= s;
    return r;
  }
  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += c[static_cast<std::size_t>(i)] * o[i];
    return s;
  }
  double norm2() const { return std::sqrt(dot(*this)); }
  bool operator==(const Vec& o) const {
    if (dim != o.dim) return false;
    for (int i = 0; i < dim; ++i)
      if (c[static_cast<std::size_t>(i)] != o[i]) return false;
    return true;
  }
  std::vector<double> to_vector() const {
    return std::vector<double>(c.begin(), c.begin() + dim);
  }
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

inline std::string to_string(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < v.dim; ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ")";
  return os.str();
}

/// Dense square matrix, dimension 1..3, row-major with stride dim.
struct Mat {
  int dim = 0;
  std::array<double, kMaxDim * kMaxDim> a{};

  static Mat zero(int n) {
    Mat m;
    m.dim = n;
    return m;
  }
  static Mat identity(int n) {
    Mat m = zero(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
  static Mat diag(std::initializer_list<double> d) {
    Mat m = zero(static_cast<int>(d.size()));
    int i = 0;
    for (double x : d) m.at(i, i) = x, ++i;
    return m;
  }

  double& at(int i, int j) { return a[static_cast<std::size_t>(i * dim + j)]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i * dim + j)]; }

  /// v^T M v
  double quad(const Vec& v) const {
    double s = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) s += at(i, j) * v[i] * v[j];
    return s;
  }
  Mat operator*(double s) const {
    Mat r = *this;
    for (auto& x : r.a) x *= s;
    return r;
  }
};

struct BoxDomain {
  int dim = 0;
  Vec lo, hi;

  BoxDomain() = default;
  BoxDomain(Vec lo_, Vec hi_) : dim(lo_.dim), lo(lo_), hi(hi_) {
    if (lo.dim != hi.dim) throw std::invalid_argument("BoxDomain: dim mismatch");
    for (int i = 0; i < dim; ++i)
      if (!(lo[i] < hi[i])) throw std::invalid_argument("BoxDomain: requires min < max per axis");
  }
  static BoxDomain square(double a, double b, int n) {
    Vec lo = Vec::zero(n), hi = Vec::zero(n);
    for (int i = 0; i < n; ++i) lo[i] = a, hi[i] = b;
    return BoxDomain(lo, hi);
  }

  double extent(int i) const { return hi[i] - lo[i]; }
  double min_extent() const {
    double m = extent(0);
    for (int i = 1; i < dim; ++i) m = std::min(m, extent(i));
    return m;
  }
  bool contains_strict(const Vec& p) const {
    if (p.dim != dim) return false;
    for (int i = 0; i < dim; ++i)
      if (!(lo[i] < p[i] && p[i] < hi[i])) return false;
    return true;
  }
  Vec center() const {
    Vec c = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
  }
  /// Clamp into the box, inset by a relative margin per side.
  Vec clamp_inside(const Vec& p, double rel = 1e-9) const {
    Vec r = p;
    r.dim = dim;
    for (int i = 0; i < dim; ++i) {
      double m = rel * extent(i);
      r[i] = std::min(std::max(p[i], lo[i] + m), hi[i] - m);
    }
    return r;
  }
  BoxDomain shrunk(double margin) const {
    Vec l = lo, h = hi;
    for (int i = 0; i < dim; ++i) l[i] += margin, h[i] -= margin;
    return BoxDomain(l, h);
  }
  bool contains_box(const BoxDomain& b) const {
    if (b.dim != dim) return false;
    for (int i = 0; i < dim; ++i)
      if (b.lo[i] < lo[i] || b.hi[i] > hi[i]) return false;
    return true;
  }
};

// Error taxonomy. Everything derives from lowreg::Error so callers can catch
// the library's failures in one place.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : Error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : Error(msg + " at offset " + std::to_string(off)), offset(off) {}
};
struct EvalError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ParamError : Error {
  using Error::Error;
};
struct SpdError : Error {
  using Error::Error;
};
struct JoinError : Error {
  using Error::Error;
};
struct ResolutionError : Error {
  using Error::Error;
};
struct CoverError : Error {
  using Error::Error;
};
struct DistanceInconsistency : Error {
  using Error::Error;
};

}  // namespace lowreg
