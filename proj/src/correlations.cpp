#include "qmix/correlations.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qmix/errors.hpp"
#include "qmix/linalg.hpp"
#include "qmix/parallel.hpp"

namespace qmix {

namespace {

long checked_split(const Matrix& rho_ab, long d_a) {
  if (rho_ab.rows() != rho_ab.cols()) throw ShapeMismatch("state is not square");
  if (d_a <= 0 || rho_ab.rows() % d_a != 0)
    throw DimensionMismatch("dimension " + std::to_string(d_a) + " does not divide " +
                            std::to_string(rho_ab.rows()));
  return rho_ab.rows() / d_a;
}

Matrix trace_out_second(const Matrix& m, long d_a, long d_b) {
  Matrix out = Matrix::Zero(d_a, d_a);
  for (long j = 0; j < d_a; ++j)
    for (long i = 0; i < d_a; ++i)
      for (long k = 0; k < d_b; ++k) out(i, j) += m(i * d_b + k, j * d_b + k);
  return out;
}

Matrix trace_out_first(const Matrix& m, long d_a, long d_b) {
  Matrix out = Matrix::Zero(d_b, d_b);
  for (long j = 0; j < d_b; ++j)
    for (long i = 0; i < d_b; ++i)
      for (long k = 0; k < d_a; ++k) out(i, j) += m(k * d_b + i, k * d_b + j);
  return out;
}

Matrix sign_of(const Matrix& h) {
  return hermitian_function(h, [](double x) { return x >= 0.0 ? 1.0 : -1.0; });
}

Matrix product_difference(const Matrix& rho_ab, long d_a, long d_b) {
  Matrix rho_a = trace_out_second(rho_ab, d_a, d_b);
  Matrix rho_b = trace_out_first(rho_ab, d_a, d_b);
  Matrix delta = rho_ab - kron(rho_a, rho_b);
  return 0.5 * (delta + delta.adjoint());
}

struct Restart {
  double value = 0.0;
  Matrix f, g;
  std::vector<double> history;
};

Restart alternate(const Matrix& delta, long d_a, long d_b, std::uint64_t seed,
                  const CovarianceOptions& opt) {
  Rng rng(seed);
  Restart r;
  r.g = sign_of(random_hermitian(d_b, rng));
  const Matrix id_a = Matrix::Identity(d_a, d_a);
  const Matrix id_b = Matrix::Identity(d_b, d_b);
  double previous = -1.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Matrix mg = trace_out_second(kron(id_a, r.g) * delta, d_a, d_b);
    mg = 0.5 * (mg + mg.adjoint());
    r.f = sign_of(mg);
    r.history.push_back((r.f * mg).trace().real());

    Matrix nf = trace_out_first(kron(r.f, id_b) * delta, d_a, d_b);
    nf = 0.5 * (nf + nf.adjoint());
    r.g = sign_of(nf);
    r.value = (r.g * nf).trace().real();
    r.history.push_back(r.value);
    if (r.value - previous < opt.tol) break;
    previous = r.value;
  }
  return r;
}

double inverse_norm_or_inf(const Matrix& rho_ab) {
  const double lo = hermitian_eigenvalues(rho_ab)(0);
  if (lo <= rank_tol(rho_ab.rows())) return std::numeric_limits<double>::infinity();
  return 1.0 / lo;
}

void check_regions(const DenseOperator& rho, const Region& a, const Region& b) {
  if (a.empty() || b.empty()) throw EmptyRegion("correlation regions must be nonempty");
  if (!(a.lattice() == b.lattice())) throw ShapeMismatch("regions live on different lattices");
  if (a.intersects(b)) throw OverlappingRegions("regions A and B overlap");
  if (rho.sites() != a.lattice().size())
    throw DimensionMismatch("state has " + std::to_string(rho.sites()) + " sites, lattice has " +
                            std::to_string(a.lattice().size()));
  for (int d : rho.site_dims())
    if (d != rho.site_dims().front()) throw DimensionMismatch("mixed local dimensions");
}

long region_dim(const DenseOperator& rho, const Region& r) {
  long d = 1;
  for (std::size_t k = 0; k < r.size(); ++k) d *= rho.site_dims().front();
  return d;
}

}  // namespace

Matrix reduced_pair(const DenseOperator& rho, const Region& a, const Region& b) {
  check_regions(rho, a, b);
  std::vector<int> keep = a.sites();
  keep.insert(keep.end(), b.sites().begin(), b.sites().end());
  return reduce(rho.matrix(), keep, rho.sites(), rho.site_dims().front());
}

CovarianceResult covariance_correlation(const Matrix& rho_ab, long d_a,
                                        const CovarianceOptions& options) {
  const long d_b = checked_split(rho_ab, d_a);
  const Matrix delta = product_difference(rho_ab, d_a, d_b);
  const int restarts = std::max(1, options.restarts);
  std::vector<Restart> runs(static_cast<std::size_t>(restarts));
  parallel_for(
      runs.size(),
      [&](std::size_t k) { runs[k] = alternate(delta, d_a, d_b, derive_seed(options.seed, k), options); },
      options.threads);

  CovarianceResult out;
  std::size_t best = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    out.per_restart.push_back(runs[k].value);
    if (runs[k].value > runs[best].value) best = k;
  }
  out.value = std::max(0.0, runs[best].value);
  out.f = std::move(runs[best].f);
  out.g = std::move(runs[best].g);
  out.history = std::move(runs[best].history);
  return out;
}

double trace_correlation(const Matrix& rho_ab, long d_a) {
  const long d_b = checked_split(rho_ab, d_a);
  return trace_norm(product_difference(rho_ab, d_a, d_b));
}

double mutual_information(const Matrix& rho_ab, long d_a) {
  const long d_b = checked_split(rho_ab, d_a);
  const double i = von_neumann_entropy(trace_out_second(rho_ab, d_a, d_b)) +
                   von_neumann_entropy(trace_out_first(rho_ab, d_a, d_b)) -
                   von_neumann_entropy(rho_ab);
  return std::max(0.0, i);
}

CorrelationTriple correlations(const Matrix& rho_ab, long d_a, const CovarianceOptions& options) {
  CorrelationTriple t;
  t.covariance = covariance_correlation(rho_ab, d_a, options).value;
  t.trace_norm = trace_correlation(rho_ab, d_a);
  t.mutual_info = mutual_information(rho_ab, d_a);
  t.d_ab = rho_ab.rows();
  t.inv_norm_ab = inverse_norm_or_inf(rho_ab);
  return t;
}

double covariance_correlation(const DenseOperator& rho, const Region& a, const Region& b,
                              const CovarianceOptions& options) {
  return covariance_correlation(reduced_pair(rho, a, b), region_dim(rho, a), options).value;
}

double trace_correlation(const DenseOperator& rho, const Region& a, const Region& b) {
  return trace_correlation(reduced_pair(rho, a, b), region_dim(rho, a));
}

double mutual_information(const DenseOperator& rho, const Region& a, const Region& b) {
  return mutual_information(reduced_pair(rho, a, b), region_dim(rho, a));
}

CorrelationTriple correlations(const DenseOperator& rho, const Region& a, const Region& b,
                               const CovarianceOptions& options) {
  return correlations(reduced_pair(rho, a, b), region_dim(rho, a), options);
}

bool CorrelationInequalities::holds(double tol) const {
  return slack_covariance_lower() >= -tol && slack_covariance_upper() >= -tol &&
         slack_mutual_info_lower() >= -tol && slack_mutual_info_upper() >= -tol;
}

CorrelationInequalities correlation_inequalities(const CorrelationTriple& values) {
  CorrelationInequalities r;
  r.values = values;
  const double d = static_cast<double>(values.d_ab);
  r.covariance_lower = values.trace_norm / (2.0 * d * d);
  r.covariance_upper = values.trace_norm;
  r.mutual_info_lower = 0.5 * values.trace_norm * values.trace_norm;
  r.mutual_info_upper_vacuous = !std::isfinite(values.inv_norm_ab);
  r.mutual_info_upper = r.mutual_info_upper_vacuous
                            ? std::numeric_limits<double>::infinity()
                            : std::log(values.inv_norm_ab) * values.trace_norm;
  return r;
}

CorrelationInequalities correlation_inequalities(const DenseOperator& rho, const Region& a,
                                                 const Region& b,
                                                 const CovarianceOptions& options) {
  return correlation_inequalities(correlations(rho, a, b, options));
}

}  // namespace qmix
