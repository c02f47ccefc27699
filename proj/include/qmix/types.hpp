#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qmix {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr cplx kI{0.0, 1.0};

/// Threshold below which a stationary-state eigenvalue counts as zero, scaled
/// by the matrix dimension.
inline double rank_tol(long dim) { return 1e-12 * static_cast<double>(dim); }

/// Eigenvalue floor applied before taking logs or fractional powers.
inline constexpr double kEigenFloor = 1e-14;

}  // namespace qmix
