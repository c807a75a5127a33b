#pragma once

#include <array>

#include "lowreg/types.hpp"

namespace lowreg {

struct EigenRange {
  double min = 0, max = 0;
};

/// Eigenvalues of a symmetric matrix, ascending; entries past dim are zero.
/// Closed form for dim <= 2, cyclic Jacobi (off-diagonal tolerance 1e-13
/// relative to the Frobenius norm) for dim 3.
std::array<double, 3> sym_eigenvalues(const Mat& m);

EigenRange sym_eigen_range(const Mat& m);

/// Sylvester criterion; exact leading-minor signs, no iteration.
bool is_spd(const Mat& m);

double max_asymmetry(const Mat& m);

/// Lower-triangular L with L L^T = m. Throws SpdError if m is not SPD.
Mat cholesky(const Mat& m);

/// Eigenvalue range of H^{-1} G for symmetric G and SPD H, reduced to the
/// symmetric problem L^{-1} G L^{-T} via the Cholesky factor of H.
EigenRange generalized_eigen_range(const Mat& g, const Mat& h);

}  // namespace lowreg
