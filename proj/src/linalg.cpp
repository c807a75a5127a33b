#include "lowreg/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace lowreg {

namespace {

// One cyclic Jacobi sweep; returns the off-diagonal Frobenius norm afterwards.
double jacobi_sweep(Mat& a, int n) {
  for (int p = 0; p < n - 1; ++p) {
    for (int q = p + 1; q < n; ++q) {
      double apq = a.at(p, q);
      if (apq == 0.0) continue;
      double app = a.at(p, p), aqq = a.at(q, q);
      double theta = (aqq - app) / (2.0 * apq);
      double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      double c = 1.0 / std::sqrt(t * t + 1.0);
      double s = t * c;
      for (int k = 0; k < n; ++k) {
        double akp = a.at(k, p), akq = a.at(k, q);
        a.at(k, p) = c * akp - s * akq;
        a.at(k, q) = s * akp + c * akq;
      }
      for (int k = 0; k < n; ++k) {
        double apk = a.at(p, k), aqk = a.at(q, k);
        a.at(p, k) = c * apk - s * aqk;
        a.at(q, k) = s * apk + c * aqk;
      }
    }
  }
  double off = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) off += a.at(i, j) * a.at(i, j);
  return std::sqrt(off);
}

}  // namespace

std::array<double, 3> sym_eigenvalues(const Mat& m) {
  std::array<double, 3> ev{0, 0, 0};
  const int n = m.dim;
  if (n == 1) {
    ev[0] = m.at(0, 0);
    return ev;
  }
  if (n == 2) {
    double a = m.at(0, 0), b = 0.5 * (m.at(0, 1) + m.at(1, 0)), c = m.at(1, 1);
    double mean = 0.5 * (a + c);
    double r = std::hypot(0.5 * (a - c), b);
    ev[0] = mean - r;
    ev[1] = mean + r;
    return ev;
  }
  Mat a = m;
  // symmetrize before iterating
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double s = 0.5 * (a.at(i, j) + a.at(j, i));
      a.at(i, j) = a.at(j, i) = s;
    }
  double fro = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) fro += a.at(i, j) * a.at(i, j);
  fro = std::sqrt(fro);
  double tol = 1e-13 * std::max(fro, 1e-300);
  for (int sweep = 0; sweep < 50; ++sweep)
    if (jacobi_sweep(a, n) <= tol) break;
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a.at(i, i);
  std::sort(ev.begin(), ev.begin() + n);
  return ev;
}

EigenRange sym_eigen_range(const Mat& m) {
  auto ev = sym_eigenvalues(m);
  return {ev[0], ev[static_cast<std::size_t>(m.dim - 1)]};
}

bool is_spd(const Mat& m) {
  const int n = m.dim;
  if (n < 1 || n > 3) return false;
  double a = m.at(0, 0);
  if (!(a > 0)) return false;
  if (n == 1) return true;
  double det2 = m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
  if (!(det2 > 0)) return false;
  if (n == 2) return true;
  double det3 = m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1)) -
                m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0)) +
                m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
  return det3 > 0;
}

double max_asymmetry(const Mat& m) {
  double worst = 0;
  for (int i = 0; i < m.dim; ++i)
    for (int j = i + 1; j < m.dim; ++j)
      worst = std::max(worst, std::abs(m.at(i, j) - m.at(j, i)));
  return worst;
}

Mat cholesky(const Mat& m) {
  const int n = m.dim;
  Mat l = Mat::zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m.at(i, j);
      for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      if (i == j) {
        if (!(s > 0)) throw SpdError("cholesky: matrix is not positive definite");
        l.at(i, i) = std::sqrt(s);
      } else {
        l.at(i, j) = s / l.at(j, j);
      }
    }
  }
  return l;
}

EigenRange generalized_eigen_range(const Mat& g, const Mat& h) {
  const int n = g.dim;
  Mat l = cholesky(h);
  // B = L^{-1} G: solve L B = G column by column (forward substitution)
  Mat b = Mat::zero(n);
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      double s = g.at(i, col);
      for (int k = 0; k < i; ++k) s -= l.at(i, k) * b.at(k, col);
      b.at(i, col) = s / l.at(i, i);
    }
  }
  // A = B L^{-T}: solve A L^T = B, i.e. per row a L^T = b row -> forward in
  // the transposed sense.
  Mat a = Mat::zero(n);
  for (int row = 0; row < n; ++row) {
    for (int j = 0; j < n; ++j) {
      double s = b.at(row, j);
      for (int k = 0; k < j; ++k) s -= a.at(row, k) * l.at(j, k);
      a.at(row, j) = s / l.at(j, j);
    }
  }
  return sym_eigen_range(a);
}

}  // namespace lowreg
