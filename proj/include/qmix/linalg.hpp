#pragma once

#include <functional>
#include <random>

#include "qmix/types.hpp"

namespace qmix {

using Rng = std::mt19937_64;

/// Applies a real scalar function to a Hermitian matrix through its
/// eigendecomposition.
Matrix hermitian_function(const Matrix& h, const std::function<double(double)>& fn);

/// Eigenvalues of the Hermitian part of `h`, ascending.
RealVector hermitian_eigenvalues(const Matrix& h);

double trace_norm(const Matrix& a);
double operator_norm(const Matrix& a);
double hermiticity_defect(const Matrix& a);

/// Von Neumann entropy in nats; eigenvalues at or below `drop` are ignored.
double von_neumann_entropy(const Matrix& rho, double drop = kEigenFloor);

/// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, long dim);

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);
Matrix kron(const Matrix& a, const Matrix& b);
SparseMatrix sparse_identity(long dim);
SparseMatrix to_sparse(const Matrix& a, double prune = 0.0);

/// Maximum absolute column sum.
double norm1(const SparseMatrix& a);

/// exp(t A) v by truncated Taylor series with sub-stepping.
Vector expmv(const SparseMatrix& a, const Vector& v, double t);

/// Haar-random unitary of the given dimension.
Matrix random_unitary(long dim, Rng& rng);
/// Random Hermitian matrix with i.i.d. Gaussian entries.
Matrix random_hermitian(long dim, Rng& rng);
/// Full-rank random density matrix from a square Ginibre matrix.
Matrix random_state(long dim, Rng& rng);
Matrix random_pure_state(long dim, Rng& rng);

/// Ordinary least squares y = a + b x. Returns {a, b, R^2}.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qmix
