#include "qmix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "qmix/errors.hpp"
#include "qmix/linalg.hpp"
#include "qmix/parallel.hpp"

namespace qmix {

WeightedContext::WeightedContext(const DenseOperator& sigma, double s)
    : WeightedContext(sigma.matrix(), s) {}

WeightedContext::WeightedContext(const Matrix& sigma, double s)
    : sigma_(0.5 * (sigma + sigma.adjoint())), s_(s) {
  if (!(s >= 0.0 && s <= 1.0)) throw ShapeMismatch("weight s must lie in [0, 1]");
  if (sigma.rows() != sigma.cols()) throw ShapeMismatch("sigma is not square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_);
  p_ = es.eigenvalues();
  v_ = es.eigenvectors();
  if (!(p_(0) > rank_tol(dim())))
    throw SingularSigma("sigma has smallest eigenvalue " + std::to_string(p_(0)));
}

Matrix WeightedContext::power(double x) const {
  RealVector px = p_.unaryExpr([x](double p) { return std::pow(std::max(p, kEigenFloor), x); });
  return v_ * px.cast<cplx>().asDiagonal() * v_.adjoint();
}

Matrix WeightedContext::log_sigma() const {
  RealVector lp = p_.unaryExpr([](double p) { return std::log(std::max(p, kEigenFloor)); });
  return v_ * lp.cast<cplx>().asDiagonal() * v_.adjoint();
}

RealMatrix WeightedContext::weights() const {
  const long d = dim();
  RealMatrix w(d, d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < d; ++i)
      w(i, j) = 0.5 * (std::pow(p_(i), s_) * std::pow(p_(j), 1 - s_) +
                       std::pow(p_(i), 1 - s_) * std::pow(p_(j), s_));
  return w;
}

Matrix WeightedContext::gamma(const Matrix& f) const {
  if (f.rows() != dim() || f.cols() != dim()) throw DimensionMismatch("operand dimension");
  Matrix ft = to_eigenbasis(f);
  return from_eigenbasis(ft.cwiseProduct(weights().cast<cplx>()));
}

cplx WeightedContext::inner(const Matrix& f, const Matrix& g) const {
  return (f.adjoint() * gamma(g)).trace();
}

Matrix gamma_s(const WeightedContext& ctx, const Matrix& f) { return ctx.gamma(f); }

namespace {

bool commutes(const SparseMatrix& a, const SparseMatrix& b, double tol) {
  SparseMatrix c = a * b - b * a;
  return c.norm() <= tol * (1.0 + a.norm() * b.norm());
}

// Operator norm of an anti-Hermitian linear map on vectors of length n.
template <class Apply>
double anti_hermitian_norm(long n, Apply apply) {
  if (n <= 256) {
    Matrix m(n, n);
    for (long k = 0; k < n; ++k) m.col(k) = apply(Vector::Unit(n, k));
    Matrix herm = cplx(0.0, 0.5) * (m - m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Rng rng(12345);
  std::normal_distribution<double> nd;
  Vector x(n);
  for (long i = 0; i < n; ++i) x(i) = cplx(nd(rng), nd(rng));
  x.normalize();
  double est = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector y = -apply(apply(x));
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    const double next = std::sqrt(ny);
    x = y / ny;
    if (std::abs(next - est) <= 1e-10 * next) return next;
    est = next;
  }
  return est;
}

// Hermitian operator B = -(D^{1/2} K D^{-1/2} + D^{-1/2} K^dag D^{1/2}) / 2 acting
// on operators written in the eigenbasis of sigma, where D multiplies entry
// (i, j) by a positive weight. The vector diag(sqrt p) is annihilated.
struct Symmetrized {
  const SparseMatrix* forward;
  const SparseMatrix* backward;
  Matrix v;
  Matrix sqrt_w;
  Vector null_vector;
  long d;

  Vector apply(const Vector& u) const {
    Matrix x = unvec(u, d);
    Matrix x1 = x.cwiseQuotient(sqrt_w);
    Matrix y1 = v.adjoint() * unvec(*forward * vec(v * x1 * v.adjoint()), d) * v;
    Matrix x2 = x.cwiseProduct(sqrt_w);
    Matrix y2 = v.adjoint() * unvec(*backward * vec(v * x2 * v.adjoint()), d) * v;
    return -0.5 * vec(y1.cwiseProduct(sqrt_w) + y2.cwiseQuotient(sqrt_w));
  }
};

Symmetrized make_symmetrized(const SparseMatrix& forward, const SparseMatrix& backward,
                             const WeightedContext& ctx, const RealMatrix& w) {
  Symmetrized sym;
  sym.forward = &forward;
  sym.backward = &backward;
  sym.v = ctx.eigenvectors();
  sym.sqrt_w = w.cwiseSqrt().cast<cplx>();
  sym.d = ctx.dim();
  Matrix u0 = Matrix::Zero(sym.d, sym.d);
  for (long i = 0; i < sym.d; ++i) u0(i, i) = std::sqrt(ctx.eigenvalues()(i));
  sym.null_vector = vec(u0);
  return sym;
}

double lanczos_smallest(const Symmetrized& sym, std::uint64_t seed) {
  const long n = sym.d * sym.d;
  const Vector& u0 = sym.null_vector;
  auto deflate = [&](Vector& x) { x -= u0 * u0.dot(x); };
  Rng rng(seed);
  std::normal_distribution<double> nd;
  Vector q(n);
  for (long i = 0; i < n; ++i) q(i) = cplx(nd(rng), nd(rng));
  deflate(q);
  q.normalize();

  const long max_steps = std::min<long>(n - 1, 600);
  std::vector<Vector> basis;
  std::vector<double> alpha, beta;
  double best = std::numeric_limits<double>::quiet_NaN();
  for (long j = 0; j < max_steps; ++j) {
    basis.push_back(q);
    Vector w = sym.apply(q);
    deflate(w);
    alpha.push_back(q.dot(w).real());
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) w -= b * b.dot(w);
      deflate(w);
    }
    const double b = w.norm();
    const bool last = b < 1e-13 || j + 1 == max_steps;
    if (last || (j + 1) % 10 == 0) {
      const long m = static_cast<long>(alpha.size());
      RealMatrix t = RealMatrix::Zero(m, m);
      for (long i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(t);
      best = es.eigenvalues()(0);
      const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
      const double residual = b * std::abs(es.eigenvectors()(m - 1, 0));
      if (residual <= 1e-10 * scale || b < 1e-13) return best;
      if (last) break;
    }
    beta.push_back(b);
    q = w / b;
  }
  throw ConvergenceFailure("Lanczos iteration did not converge");
}

double dense_smallest(const Symmetrized& sym) {
  const long n = sym.d * sym.d;
  Matrix b(n, n);
  for (long k = 0; k < n; ++k) b.col(k) = sym.apply(Vector::Unit(n, k));
  b = 0.5 * (b + b.adjoint());
  const double shift = 10.0 * b.cwiseAbs().colwise().sum().maxCoeff() + 1.0;
  b += shift * sym.null_vector * sym.null_vector.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double symmetrized_smallest(const Symmetrized& sym) {
  return sym.d <= kDenseDim ? dense_smallest(sym) : lanczos_smallest(sym, 0x5eed);
}

// BKM weights (log p_i - log p_j) / (p_i - p_j), with 1/p_i on the diagonal.
RealMatrix bkm_weights(const RealVector& p) {
  const long d = p.size();
  RealMatrix c(d, d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < d; ++i) {
      const double diff = p(i) - p(j);
      if (std::abs(diff) <= 1e-12 * std::max(p(i), p(j)))
        c(i, j) = 2.0 / (p(i) + p(j));
      else
        c(i, j) = (std::log(p(i)) - std::log(p(j))) / diff;
    }
  return c;
}

double dense_gap(const Liouvillian& l) {
  Matrix s(l.superop());
  Eigen::ComplexEigenSolver<Matrix> es(s, false);
  const double null_tol = 1e-9 * std::max(1.0, norm1(l.superop()));
  double best = -std::numeric_limits<double>::infinity();
  int zeros = 0;
  for (long i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx mu = es.eigenvalues()(i);
    if (std::abs(mu) <= null_tol) {
      ++zeros;
      continue;
    }
    best = std::max(best, mu.real());
  }
  if (zeros != 1) throw NotPrimitive("generator has " + std::to_string(zeros) + " zero eigenvalues");
  return -best;
}

// Arnoldi on exp(tau L) restricted to traceless operators; the dominant
// Ritz value is exp(-tau lambda).
double arnoldi_gap(const Liouvillian& l, const Matrix& sigma) {
  const long d = l.dim();
  const long n = d * d;
  const SparseMatrix& s = l.superop();
  Vector sig = vec(sigma);
  auto project = [&](Vector& x) {
    cplx tr = 0.0;
    for (long i = 0; i < d; ++i) tr += x(i * (d + 1));
    x -= tr * sig;
  };
  Rng rng(0xa4d1);
  std::normal_distribution<double> nd;
  Vector start(n);
  for (long i = 0; i < n; ++i) start(i) = cplx(nd(rng), nd(rng));
  double tau = 1.0;
  const long m = std::min<long>(n - 2, 80);
  for (int restart = 0; restart < 40; ++restart) {
    project(start);
    start.normalize();
    std::vector<Vector> q{start};
    Matrix h = Matrix::Zero(m + 1, m);
    long steps = m;
    for (long j = 0; j < m; ++j) {
      Vector w = expmv(s, q[j], tau);
      project(w);
      for (int pass = 0; pass < 2; ++pass)
        for (long i = 0; i <= j; ++i) {
          cplx c = q[i].dot(w);
          h(i, j) += c;
          w -= c * q[i];
        }
      h(j + 1, j) = w.norm();
      if (std::abs(h(j + 1, j)) < 1e-14) {
        steps = j + 1;
        break;
      }
      q.push_back(w / h(j + 1, j));
    }
    Matrix hm = h.topLeftCorner(steps, steps);
    Eigen::ComplexEigenSolver<Matrix> es(hm);
    long top = 0;
    for (long i = 1; i < steps; ++i)
      if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(top))) top = i;
    const cplx theta = es.eigenvalues()(top);
    if (std::abs(theta) < 1e-8) {
      tau /= 10.0;
      continue;
    }
    Vector y = es.eigenvectors().col(top);
    const double residual = steps < m + 1 && steps < static_cast<long>(q.size())
                                ? std::abs(h(steps, steps - 1) * y(steps - 1))
                                : 0.0;
    if (residual <= 1e-10 * std::abs(theta)) return -std::log(std::abs(theta)) / tau;
    Vector ritz = Vector::Zero(n);
    for (long i = 0; i < steps; ++i) ritz += y(i) * q[i];
    start = ritz;
  }
  throw ConvergenceFailure("Arnoldi iteration for the spectral gap did not converge");
}

}  // namespace

ReversibilityCheck check_s_reversibility(const Liouvillian& l, const WeightedContext& ctx,
                                         bool include_hamiltonian, double tol) {
  if (ctx.dim() != l.dim()) throw DimensionMismatch("sigma and generator dimensions differ");
  const long d = l.dim();
  const SparseMatrix& schr = include_hamiltonian ? l.superop() : l.dissipative_superop();
  SparseMatrix heis = schr.adjoint();
  const Matrix wc = ctx.weights().cast<cplx>();
  const Matrix& v = ctx.eigenvectors();
  auto gamma = [&](const Matrix& f) {
    return Matrix(v * (v.adjoint() * f * v).cwiseProduct(wc) * v.adjoint());
  };
  // R = Gamma L^* - L Gamma is anti-Hermitian, so R^dag = -R.
  auto residual_map = [&](const Vector& x) {
    Matrix f = unvec(x, d);
    return Vector(vec(gamma(unvec(heis * x, d))) - schr * vec(gamma(f)));
  };
  ReversibilityCheck rc;
  rc.residual = anti_hermitian_norm(d * d, residual_map);
  rc.scale = std::max(1.0, norm1(schr)) * ctx.eigenvalues().maxCoeff();
  rc.reversible = rc.residual <= tol * rc.scale;
  return rc;
}

double variance_s(const WeightedContext& ctx, const Matrix& f) {
  const cplx a = (f * ctx.gamma(f)).trace();
  const cplx m = (ctx.sigma() * f).trace();
  return std::abs(a.real() - (m * m).real());
}

double entropy_s(const WeightedContext& ctx, const Matrix& f) {
  if (hermiticity_defect(f) > 1e-10 * (1.0 + f.norm()))
    throw NotPositive("entropy functional needs a Hermitian operand");
  if (!(hermitian_eigenvalues(f).minCoeff() > rank_tol(f.rows())))
    throw NotPositive("entropy functional needs a positive definite operand");
  Matrix rho_t = ctx.to_eigenbasis(f).cwiseProduct(ctx.weights().cast<cplx>());
  rho_t = 0.5 * (rho_t + rho_t.adjoint());
  const double tr = rho_t.trace().real();
  double rho_log_rho = 0.0;
  for (double x : hermitian_eigenvalues(rho_t))
    if (x > kEigenFloor) rho_log_rho += x * std::log(x);
  double rho_log_sigma = 0.0;
  for (long i = 0; i < ctx.dim(); ++i)
    rho_log_sigma += rho_t(i, i).real() * std::log(std::max(ctx.eigenvalues()(i), kEigenFloor));
  return std::max(0.0, rho_log_rho - rho_log_sigma - tr * std::log(tr));
}

double chi2_constant(const Liouvillian& l, const WeightedContext& ctx) {
  if (ctx.dim() != l.dim()) throw DimensionMismatch("sigma and generator dimensions differ");
  auto sym = make_symmetrized(l.heisenberg_superop(), l.superop(), ctx, ctx.weights());
  return symmetrized_smallest(sym);
}

GapResult spectral_gap(const Liouvillian& l, const std::vector<double>& s_values,
                       GapMethod method) {
  GapResult r;
  const Matrix sigma = stationary_state(l).matrix();
  WeightedContext half(sigma, 0.5);

  bool reversible = true;
  std::vector<double> checks = s_values.empty() ? std::vector<double>{0.5} : s_values;
  for (double s : checks)
    reversible = reversible && check_s_reversibility(l, WeightedContext(sigma, s)).reversible;
  const SparseMatrix& lh = l.hamiltonian_superop();
  const Matrix& h = l.hamiltonian();
  const bool coherent_ok = (h * sigma - sigma * h).norm() <= 1e-10 * (1.0 + h.norm()) &&
                           commutes(lh, l.dissipative_superop(), 1e-10);
  r.reversible = reversible && coherent_ok;

  if (method == GapMethod::automatic) {
    if (l.dim() <= kDenseDim)
      method = GapMethod::dense;
    else
      method = r.reversible ? GapMethod::lanczos : GapMethod::arnoldi;
  }
  r.method = method;
  switch (method) {
    case GapMethod::dense:
      if (l.dim() > 64) throw Unsupported("dense spectral gap limited to dimension 64");
      r.gap = dense_gap(l);
      break;
    case GapMethod::lanczos: {
      if (!r.reversible)
        throw Unsupported("Lanczos gap needs a reversible dissipator commuting with the coherent part");
      auto sym = make_symmetrized(l.heisenberg_superop(), l.superop(), half, half.weights());
      r.gap = lanczos_smallest(sym, 0x5eed);
      break;
    }
    case GapMethod::arnoldi:
      r.gap = arnoldi_gap(l, sigma);
      break;
    case GapMethod::automatic:
      break;
  }

  for (double s : s_values) {
    WeightedContext ctx(sigma, s);
    const double lam = (r.method == GapMethod::lanczos && s == 0.5) ? r.gap : chi2_constant(l, ctx);
    r.chi2.emplace_back(s, lam);
    r.chi2_mismatch = std::max(r.chi2_mismatch, std::abs(lam - r.gap) / r.gap);
  }
  return r;
}

namespace {

// Entropy along the Heisenberg flow, with propagators for the finite
// differences cached when the superoperator is small.
class EntropyFlow {
 public:
  EntropyFlow(const Liouvillian& l, const WeightedContext& ctx) : l_(l), ctx_(ctx) {
    const double rate = std::max(1.0, norm1(l.heisenberg_superop()));
    delta_ = 2e-3 / rate;
    if (l.dim() <= kDenseDim) {
      Matrix k(l.heisenberg_superop());
      for (double t : {delta_, -delta_, 0.5 * delta_, -0.5 * delta_}) props_.push_back((k * t).exp());
    }
  }

  double entropy_at(const Matrix& f, int which) const {
    static constexpr double factors[4] = {1.0, -1.0, 0.5, -0.5};
    Matrix ft;
    if (!props_.empty())
      ft = unvec(props_[which] * vec(f), l_.dim());
    else
      ft = unvec(expmv(l_.heisenberg_superop(), vec(f), factors[which] * delta_), l_.dim());
    return entropy_unchecked(0.5 * (ft + ft.adjoint()));
  }

  // Returns {Ent(f), -d/dt Ent(f_t) at 0}.
  std::pair<double, double> derivative(const Matrix& f) const {
    const double e0 = entropy_unchecked(f);
    const double d1 = (entropy_at(f, 0) - entropy_at(f, 1)) / (2 * delta_);
    const double d2 = (entropy_at(f, 2) - entropy_at(f, 3)) / delta_;
    return {e0, -(4.0 * d2 - d1) / 3.0};
  }

  double entropy_unchecked(const Matrix& f) const {
    Matrix rho_t = ctx_.to_eigenbasis(f).cwiseProduct(w_());
    rho_t = 0.5 * (rho_t + rho_t.adjoint());
    const double tr = rho_t.trace().real();
    double a = 0.0;
    for (double x : hermitian_eigenvalues(rho_t))
      if (x > kEigenFloor) a += x * std::log(x);
    double b = 0.0;
    for (long i = 0; i < ctx_.dim(); ++i)
      b += rho_t(i, i).real() * std::log(std::max(ctx_.eigenvalues()(i), kEigenFloor));
    return a - b - tr * std::log(tr);
  }

  // Relative entropy of the normalized Gamma(f) with respect to sigma.
  double relative_entropy(const Matrix& f) const {
    Matrix rho_t = ctx_.to_eigenbasis(f).cwiseProduct(w_());
    return entropy_unchecked(f) / rho_t.trace().real();
  }

 private:
  const Liouvillian& l_;
  const WeightedContext& ctx_;
  double delta_ = 0.0;
  std::vector<Matrix> props_;
  mutable Matrix w_cache_;

  const Matrix& w_() const {
    if (w_cache_.size() == 0) w_cache_ = ctx_.weights().cast<cplx>();
    return w_cache_;
  }
};

Matrix hermitian_from_params(const double* x, long d) {
  Matrix h(d, d);
  long k = 0;
  for (long i = 0; i < d; ++i) h(i, i) = x[k++];
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < j; ++i) {
      h(i, j) = cplx(x[k], x[k + 1]);
      h(j, i) = std::conj(h(i, j));
      k += 2;
    }
  return h;
}

struct TrialSpace {
  long dim;
  int sites;
  bool local;
  std::size_t params() const { return local ? static_cast<std::size_t>(4 * sites) : dim * dim; }
  Matrix trial(const double* x) const {
    if (!local) return hermitian_function(hermitian_from_params(x, dim), [](double e) { return std::exp(e); });
    Matrix f = Matrix::Identity(1, 1);
    for (int q = 0; q < sites; ++q)
      f = kron(f, hermitian_function(hermitian_from_params(x + 4 * q, 2),
                                     [](double e) { return std::exp(e); }));
    return f;
  }
};

struct Objective {
  const EntropyFlow* flow;
  const TrialSpace* space;
  double floor;
};

double objective(const gsl_vector* x, void* params) {
  const auto* o = static_cast<const Objective*>(params);
  Matrix f = o->space->trial(x->data);
  f /= f.trace().real();
  if (!f.allFinite()) return 1e6;
  if (o->flow->relative_entropy(f) < o->floor) return 1e6;
  auto [e, rate] = o->flow->derivative(f);
  const double ratio = rate / (2.0 * e);
  return std::isfinite(ratio) ? ratio : 1e6;
}

double run_restart(const EntropyFlow& flow, const TrialSpace& space, double floor,
                   std::uint64_t seed, int max_iterations) {
  const std::size_t n = space.params();
  Rng rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, nd(rng));
  gsl_vector_set_all(step, 0.5);
  Objective obj{&flow, &space, floor};
  gsl_multimin_function fn{&objective, n, &obj};
  gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(m, &fn, x, step);
  for (int it = 0; it < max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), 1e-8) == GSL_SUCCESS) break;
  }
  const double best = gsl_multimin_fminimizer_minimum(m);
  gsl_multimin_fminimizer_free(m);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return best;
}

}  // namespace

double log_sobolev_ratio(const Liouvillian& l, const WeightedContext& ctx, const Matrix& f) {
  EntropyFlow flow(l, ctx);
  auto [e, rate] = flow.derivative(f);
  return rate / (2.0 * e);
}

double log_sobolev_ratio_exact(const Liouvillian& l, const WeightedContext& ctx,
                               const Matrix& f) {
  Matrix rho = ctx.gamma(f);
  Matrix log_rho = hermitian_function(rho, [](double x) { return std::log(std::max(x, kEigenFloor)); });
  const double production = -(l.apply(rho) * (log_rho - ctx.log_sigma())).trace().real();
  return production / (2.0 * entropy_s(ctx, f));
}

LogSobolevResult log_sobolev_estimate(const Liouvillian& l, const WeightedContext& ctx,
                                      const LogSobolevOptions& options) {
  if (ctx.dim() != l.dim()) throw DimensionMismatch("sigma and generator dimensions differ");
  if (options.restarts < 1) throw ShapeMismatch("need at least one restart");
  gsl_set_error_handler_off();
  LogSobolevResult r;
  WeightedContext half(ctx.sigma(), 0.5);
  auto sym = make_symmetrized(l.superop(), l.heisenberg_superop(), half, bkm_weights(half.eigenvalues()));
  r.linearized = symmetrized_smallest(sym);

  EntropyFlow flow(l, ctx);
  TrialSpace space{l.dim(), l.lattice().size(), l.dim() > 8 && l.local_dim() == 2};
  if (l.dim() > 8 && l.local_dim() != 2) throw Unsupported("local trial states need qubit sites");
  r.per_restart.assign(options.restarts, std::numeric_limits<double>::infinity());
  parallel_for(
      static_cast<std::size_t>(options.restarts),
      [&](std::size_t k) {
        r.per_restart[k] = run_restart(flow, space, options.entropy_floor,
                                       derive_seed(options.seed, k), options.max_iterations);
      },
      options.threads);
  r.variational = std::numeric_limits<double>::infinity();
  for (double v : r.per_restart)
    if (v < 1e5) r.variational = std::min(r.variational, v);
  if (!std::isfinite(r.variational))
    throw ConvergenceFailure("every Log-Sobolev restart stayed below the entropy floor");
  r.estimate = std::min(r.variational, r.linearized);
  return r;
}

std::pair<double, double> mixing_bounds(double inv_norm, double lambda, double alpha, double t) {
  if (!(inv_norm >= 1.0)) throw ShapeMismatch("inverse norm must be at least 1");
  if (!(lambda >= 0.0 && alpha >= 0.0 && t >= 0.0))
    throw ShapeMismatch("rates and time must be nonnegative");
  return {std::sqrt(inv_norm) * std::exp(-lambda * t),
          std::sqrt(2.0 * std::log(inv_norm)) * std::exp(-alpha * t)};
}

double inverse_norm(const Matrix& sigma) {
  const double m = hermitian_eigenvalues(sigma).minCoeff();
  if (!(m > rank_tol(sigma.rows())))
    throw SingularSigma("state has smallest eigenvalue " + std::to_string(m));
  return 1.0 / m;
}

double shifted_thermal_bound(const Matrix& h, double beta) {
  RealVector e = hermitian_eigenvalues(h);
  return static_cast<double>(h.rows()) * std::exp(beta * (e.maxCoeff() - e.minCoeff()));
}

ThermalBound thermal_bound(const Matrix& h, double beta) {
  RealVector e = hermitian_eigenvalues(h);
  if (!(e.minCoeff() > 0.0)) throw NonPositiveH("thermal bound needs a positive definite Hamiltonian");
  ThermalBound b;
  const double d = static_cast<double>(h.rows());
  b.lower = d;
  b.upper = d * std::exp(beta * (e.maxCoeff() - e.minCoeff()));
  b.shifted_upper = shifted_thermal_bound(h, beta);
  return b;
}

MixingSummary mixing_summary(const Liouvillian& l, const LogSobolevOptions& options) {
  MixingSummary m;
  GapResult g = spectral_gap(l);
  m.gap = g.gap;
  m.chi2 = g.chi2;
  m.reversible = g.reversible;
  DenseOperator sigma = stationary_state(l);
  m.inv_norm = inverse_norm(sigma.matrix());
  if (g.reversible) {
    m.ls_estimate = log_sobolev_estimate(l, WeightedContext(sigma, 0.5), options).estimate;
  } else {
    m.ls_estimate = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

}  // namespace qmix
