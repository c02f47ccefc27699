#include "qmix/linalg.hpp"

#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

#include "qmix/errors.hpp"

namespace qmix {

Matrix hermitian_function(const Matrix& h, const std::function<double(double)>& fn) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  RealVector f = es.eigenvalues().unaryExpr(fn);
  return es.eigenvectors() * f.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

RealVector hermitian_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double trace_norm(const Matrix& a) {
  if (hermiticity_defect(a) <= 1e-13 * (1.0 + a.norm())) {
    return hermitian_eigenvalues(a).cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (hermiticity_defect(a) <= 1e-13 * (1.0 + a.norm())) {
    return hermitian_eigenvalues(a).cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double hermiticity_defect(const Matrix& a) { return (a - a.adjoint()).norm(); }

double von_neumann_entropy(const Matrix& rho, double drop) {
  double s = 0.0;
  for (double p : hermitian_eigenvalues(rho)) {
    if (p > drop) s -= p * std::log(p);
  }
  return s;
}

Vector vec(const Matrix& a) { return Eigen::Map<const Vector>(a.data(), a.size()); }

Matrix unvec(const Vector& v, long dim) { return Eigen::Map<const Matrix>(v.data(), dim, dim); }

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out = Eigen::kroneckerProduct(a, b);
  out.makeCompressed();
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b); }

SparseMatrix sparse_identity(long dim) {
  SparseMatrix id(dim, dim);
  id.setIdentity();
  return id;
}

SparseMatrix to_sparse(const Matrix& a, double prune) {
  std::vector<Eigen::Triplet<cplx>> trip;
  for (long j = 0; j < a.cols(); ++j)
    for (long i = 0; i < a.rows(); ++i)
      if (std::abs(a(i, j)) > prune) trip.emplace_back(i, j, a(i, j));
  SparseMatrix s(a.rows(), a.cols());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

double norm1(const SparseMatrix& a) {
  double best = 0.0;
  for (long k = 0; k < a.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

Vector expmv(const SparseMatrix& a, const Vector& v, double t) {
  constexpr double theta = 4.0;
  constexpr int max_terms = 60;
  if (t == 0.0 || v.size() == 0) return v;
  const double scale = norm1(a) * std::abs(t);
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(scale / theta)));
  const double h = t / static_cast<double>(steps);
  Vector out = v;
  for (long s = 0; s < steps; ++s) {
    Vector term = out;
    Vector acc = out;
    const double base = acc.norm();
    for (int k = 1; k <= max_terms; ++k) {
      term = (a * term) * (h / k);
      acc += term;
      if (term.norm() <= 1e-17 * std::max(base, acc.norm())) break;
      if (k == max_terms) throw ConvergenceFailure("Taylor series for exp(tA)v did not converge");
    }
    out = std::move(acc);
  }
  return out;
}

namespace {
Matrix ginibre(long dim, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix g(dim, dim);
  for (long j = 0; j < dim; ++j)
    for (long i = 0; i < dim; ++i) g(i, j) = cplx(n(rng), n(rng));
  return g;
}
}  // namespace

Matrix random_unitary(long dim, Rng& rng) {
  Matrix g = ginibre(dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long i = 0; i < dim; ++i) {
    const cplx d = r(i, i);
    q.col(i) *= std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0);
  }
  return q;
}

Matrix random_hermitian(long dim, Rng& rng) {
  Matrix g = ginibre(dim, rng);
  return 0.5 * (g + g.adjoint());
}

Matrix random_state(long dim, Rng& rng) {
  Matrix g = ginibre(dim, rng);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace();
}

Matrix random_pure_state(long dim, Rng& rng) {
  Vector psi = random_unitary(dim, rng).col(0);
  return psi * psi.adjoint();
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InsufficientRows("linear fit needs at least two points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InsufficientRows("linear fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace qmix
