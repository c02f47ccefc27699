#include "qmix/fermion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <lapacke.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "qmix/errors.hpp"

namespace qmix {

namespace {

constexpr double kStabilityTol = 1e-12;

double max_abs(const RealMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Majorana coefficients of a_m: a_m = u^T r.
Vector lowering_vector(int modes, int m) {
  Vector u = Vector::Zero(2 * modes);
  u(2 * m) = 1.0 / std::sqrt(2.0);
  u(2 * m + 1) = cplx(0.0, -1.0 / std::sqrt(2.0));
  return u;
}

void check_mode(int m, int modes) {
  if (m < 0 || m >= modes)
    throw SupportNotContained("mode " + std::to_string(m) + " outside 0.." +
                              std::to_string(modes - 1));
}

// Largest real part of the drift spectrum, or +inf if LAPACK fails.
double max_real_eigenvalue(const RealMatrix& x) {
  Eigen::EigenSolver<RealMatrix> es(x, false);
  if (es.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  return es.eigenvalues().real().maxCoeff();
}

void check_regions(const CovarianceMatrix& gamma, const Region& a, const Region& b) {
  if (a.empty() || b.empty()) throw EmptyRegion("mode regions must be nonempty");
  if (!(a.lattice() == b.lattice())) throw ShapeMismatch("regions live on different lattices");
  if (a.intersects(b)) throw OverlappingRegions("regions A and B overlap");
  if (a.lattice().size() != gamma.modes())
    throw DimensionMismatch("covariance has " + std::to_string(gamma.modes()) +
                            " modes, lattice has " + std::to_string(a.lattice().size()));
}

double binary_term(double x) {
  const double p = 0.5 * (1.0 + x);
  return p > kEigenFloor ? -p * std::log2(p) : 0.0;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(RealMatrix gamma, double tol) : gamma_(std::move(gamma)) {
  if (gamma_.rows() != gamma_.cols() || gamma_.rows() % 2 != 0)
    throw ShapeMismatch("covariance matrix must be square of even size");
  if (max_abs(gamma_ + gamma_.transpose()) > tol)
    throw ShapeMismatch("covariance matrix is not antisymmetric");
  gamma_ = 0.5 * (gamma_ - gamma_.transpose());
  if (gamma_.rows() > 0) {
    const double top = Eigen::BDCSVD<RealMatrix>(gamma_).singularValues()(0);
    if (top > 1.0 + tol)
      throw NotPositive("covariance matrix has singular value " + std::to_string(top));
  }
}

QuadraticLiouvillian::QuadraticLiouvillian(int modes, RealMatrix h, std::vector<Vector> jumps,
                                           std::vector<std::vector<int>> supports)
    : modes_(modes), h_(std::move(h)), jumps_(std::move(jumps)), supports_(std::move(supports)) {
  const long n = 2L * modes_;
  if (modes_ < 1) throw ShapeMismatch("at least one mode is required");
  if (h_.rows() != n || h_.cols() != n) throw ShapeMismatch("h must be 2N x 2N");
  if (max_abs(h_ + h_.transpose()) > 1e-12 * std::max(1.0, max_abs(h_)))
    throw ShapeMismatch("h is not antisymmetric");
  for (const auto& l : jumps_)
    if (l.size() != n) throw ShapeMismatch("jump vectors must have length 2N");
  if (supports_.empty()) {
    for (const auto& l : jumps_) {
      std::vector<int> s;
      for (int m = 0; m < modes_; ++m)
        if (l(2 * m) != 0.0 || l(2 * m + 1) != 0.0) s.push_back(m);
      supports_.push_back(std::move(s));
    }
  } else if (supports_.size() != jumps_.size()) {
    throw ShapeMismatch("one support per jump is required");
  }

  Matrix stacked(n, static_cast<long>(jumps_.size()));
  for (std::size_t j = 0; j < jumps_.size(); ++j) stacked.col(static_cast<long>(j)) = jumps_[j];
  const Matrix m = stacked * stacked.adjoint();
  drift_ = -2.0 * h_ - m.real();
  noise_ = 2.0 * m.imag();
}

QuadraticLiouvillian build_quadratic(const Lattice& lattice, const std::vector<QuadraticTerm>& h_terms,
                                     const std::vector<JumpSpec>& jump_specs) {
  const int modes = lattice.size();
  const long n = 2L * modes;
  // H = sum K_kl r_k r_l up to a constant; its antisymmetric part gives h.
  // Each a_m touches two Majoranas, so the outer products are written entrywise.
  Matrix k = Matrix::Zero(n, n);
  const cplx u[2] = {1.0 / std::sqrt(2.0), cplx(0.0, -1.0 / std::sqrt(2.0))};
  auto add = [&](cplx coef, int mi, bool conj_i, int mj, bool conj_j) {
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        k(2 * mi + p, 2 * mj + q) +=
            coef * (conj_i ? std::conj(u[p]) : u[p]) * (conj_j ? std::conj(u[q]) : u[q]);
  };
  for (const auto& t : h_terms) {
    check_mode(t.i, modes);
    check_mode(t.j, modes);
    switch (t.kind) {
      case QuadraticTerm::Kind::hopping:
        add(t.value, t.i, true, t.j, false);
        add(std::conj(t.value), t.j, true, t.i, false);
        break;
      case QuadraticTerm::Kind::pairing:
        if (t.i == t.j) throw ShapeMismatch("pairing needs two distinct modes");
        add(t.value, t.i, false, t.j, false);
        add(std::conj(t.value), t.j, true, t.i, true);
        break;
      case QuadraticTerm::Kind::potential:
        if (t.i != t.j) throw ShapeMismatch("potential acts on a single mode");
        add(t.value.real(), t.i, true, t.i, false);
        break;
    }
  }
  RealMatrix h = (cplx(0.0, -0.5) * (k - k.transpose())).real();
  h = 0.5 * (h - h.transpose());

  std::vector<Vector> jumps;
  std::vector<std::vector<int>> supports;
  for (const auto& spec : jump_specs) {
    Vector l = Vector::Zero(n);
    std::vector<int> support;
    for (const auto& [m, u] : spec.lowering) {
      check_mode(m, modes);
      l += u * lowering_vector(modes, m);
      support.push_back(m);
    }
    for (const auto& [m, v] : spec.raising) {
      check_mode(m, modes);
      l += v * lowering_vector(modes, m).conjugate();
      support.push_back(m);
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    jumps.push_back(std::move(l));
    supports.push_back(std::move(support));
  }
  return QuadraticLiouvillian(modes, std::move(h), std::move(jumps), std::move(supports));
}

QuadraticSpec uniform_chain_spec(int modes, double hop, double pairing, double potential,
                                double loss, double gain) {
  if (loss < 0.0 || gain < 0.0) throw ShapeMismatch("rates must be nonnegative");
  QuadraticSpec out;
  for (int m = 0; m < modes; ++m) {
    if (potential != 0.0) out.terms.push_back({QuadraticTerm::Kind::potential, m, m, potential});
    if (m + 1 < modes) {
      if (hop != 0.0) out.terms.push_back({QuadraticTerm::Kind::hopping, m, m + 1, hop});
      if (pairing != 0.0) out.terms.push_back({QuadraticTerm::Kind::pairing, m, m + 1, pairing});
    }
    if (loss > 0.0) out.jumps.push_back({{{m, std::sqrt(loss)}}, {}});
    if (gain > 0.0) out.jumps.push_back({{}, {{m, std::sqrt(gain)}}});
  }
  return out;
}

QuadraticLiouvillian uniform_chain(int modes, double hop, double pairing, double potential,
                                   double loss, double gain) {
  const QuadraticSpec spec = uniform_chain_spec(modes, hop, pairing, potential, loss, gain);
  return build_quadratic(Lattice::chain(modes), spec.terms, spec.jumps);
}

double lyapunov_residual(const QuadraticLiouvillian& ql, const RealMatrix& gamma) {
  const RealMatrix& x = ql.drift();
  return (x.transpose() * gamma + gamma * x + ql.noise()).norm();
}

CovarianceMatrix stationary_covariance(const QuadraticLiouvillian& ql) {
  const lapack_int n = static_cast<lapack_int>(ql.drift().rows());
  RealMatrix t = ql.drift();
  RealMatrix q(n, n);
  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, t.data(), n, &sdim,
                                  wr.data(), wi.data(), q.data(), n);
  if (info != 0) throw ConvergenceFailure("Schur decomposition failed, info " + std::to_string(info));
  const double top = *std::max_element(wr.begin(), wr.end());
  if (!(top < -kStabilityTol * std::max(1.0, max_abs(ql.drift()))))
    throw NotStable("drift has an eigenvalue with real part " + std::to_string(top));

  // With X = Q T Q^T the equation becomes T^T G + G T = -Q^T Y Q for G = Q^T gamma Q.
  RealMatrix c = -(q.transpose() * ql.noise() * q);
  double scale = 1.0;
  info = LAPACKE_dtrsyl(LAPACK_COL_MAJOR, 'T', 'N', 1, n, n, t.data(), n, t.data(), n, c.data(), n,
                        &scale);
  if (info < 0) throw ConvergenceFailure("Sylvester solve failed, info " + std::to_string(info));
  RealMatrix gamma = q * (c / scale) * q.transpose();
  return CovarianceMatrix(0.5 * (gamma - gamma.transpose()), 1e-8);
}

CovarianceMatrix evolve_covariance(const QuadraticLiouvillian& ql, const CovarianceMatrix& gamma0,
                                   double t) {
  if (!(t >= 0.0)) throw ShapeMismatch("time must be nonnegative");
  if (gamma0.modes() != ql.modes()) throw DimensionMismatch("covariance and Liouvillian sizes");
  if (t == 0.0) return gamma0;
  const RealMatrix& x = ql.drift();
  const long n = x.rows();
  RealMatrix gamma;
  if (max_real_eigenvalue(x) < -kStabilityTol * std::max(1.0, max_abs(x))) {
    const RealMatrix ss = stationary_covariance(ql).gamma();
    const RealMatrix e = (x * t).exp();
    gamma = e.transpose() * (gamma0.gamma() - ss) * e + ss;
  } else {
    // exp([[-X^T, Y], [0, X]] t) = [[., F], [0, E]] gives int_0^t e^{X^T s} Y e^{X s} ds = E^T F.
    RealMatrix big = RealMatrix::Zero(2 * n, 2 * n);
    big.topLeftCorner(n, n) = -x.transpose();
    big.topRightCorner(n, n) = ql.noise();
    big.bottomRightCorner(n, n) = x;
    const RealMatrix f = (big * t).exp();
    const RealMatrix e = f.bottomRightCorner(n, n);
    gamma = e.transpose() * gamma0.gamma() * e + e.transpose() * f.topRightCorner(n, n);
  }
  return CovarianceMatrix(0.5 * (gamma - gamma.transpose()), 1e-8);
}

RealVector normal_modes(const CovarianceMatrix& gamma) {
  const int modes = gamma.modes();
  RealVector c(modes);
  if (modes == 0) return c;
  RealVector sv = Eigen::BDCSVD<RealMatrix>(gamma.gamma()).singularValues();
  for (int j = 0; j < modes; ++j) c(j) = std::clamp(sv(2 * j), 0.0, 1.0);
  return c;
}

GaussianMinEigenvalue gaussian_min_eigenvalue(const CovarianceMatrix& gamma, double tol) {
  GaussianMinEigenvalue out;
  const RealVector c = normal_modes(gamma);
  out.value = 1.0;
  for (int j = 0; j < c.size(); ++j) {
    if (c(j) >= 1.0 - tol) {
      out.pure = true;
      out.value = 0.0;
      return out;
    }
    out.value *= 0.5 * (1.0 - c(j));
  }
  return out;
}

double gaussian_min_eigenvalue_trace_form(const CovarianceMatrix& gamma) {
  const RealMatrix sq = -gamma.gamma() * gamma.gamma();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (sq + sq.transpose()), Eigen::EigenvaluesOnly);
  double log_sum = 0.0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const double a = std::sqrt(std::max(0.0, es.eigenvalues()(k)));
    if (a >= 1.0) return 0.0;
    log_sum += std::log(0.5 * (1.0 - a));
  }
  return std::exp(0.5 * log_sum);
}

RealMatrix covariance_block(const CovarianceMatrix& gamma, const Region& a, const Region& b) {
  check_regions(gamma, a, b);
  std::vector<long> idx;
  for (const Region* r : {&a, &b})
    for (int m : r->sites()) {
      idx.push_back(2L * m);
      idx.push_back(2L * m + 1);
    }
  return gamma.gamma()(idx, idx);
}

double mode_entropy_bits(const RealMatrix& gamma) {
  if (gamma.rows() == 0) return 0.0;
  const Matrix ig = kI * gamma.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (ig + ig.adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < es.eigenvalues().size(); ++k)
    s += binary_term(std::clamp(es.eigenvalues()(k), -1.0, 1.0));
  return s;
}

FermionMutualInformation fermion_mutual_information(const CovarianceMatrix& gamma, const Region& a,
                                                    const Region& b) {
  const RealMatrix g = covariance_block(gamma, a, b);
  const long na = 2L * static_cast<long>(a.size());
  RealMatrix xi = g;
  xi.topRightCorner(na, g.cols() - na).setZero();
  xi.bottomLeftCorner(g.rows() - na, na).setZero();
  FermionMutualInformation out;
  out.bits = std::max(0.0, mode_entropy_bits(xi) - mode_entropy_bits(g));
  out.nats = out.bits * std::log(2.0);
  return out;
}

bool FermionBoundReport::holds(double tol) const {
  if (slack < -tol) return false;
  return !slack_with_covariance || *slack_with_covariance >= -tol;
}

FermionBoundReport fermion_bound_report(const CovarianceMatrix& gamma, const Region& a,
                                        const Region& b, std::optional<double> covariance) {
  check_regions(gamma, a, b);
  if (a.size() != b.size())
    throw UnequalBlocks("blocks have " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()) + " modes");
  FermionBoundReport r;
  r.n = static_cast<int>(a.size());
  const long na = 2L * r.n;
  const RealMatrix g = covariance_block(gamma, a, b);
  RealMatrix xi = g;
  xi.topRightCorner(na, na).setZero();
  xi.bottomLeftCorner(na, na).setZero();
  auto op_norm = [](const RealMatrix& m) { return Eigen::JacobiSVD<RealMatrix>(m).singularValues()(0); };
  r.norm_gamma_ab = op_norm(g);
  r.norm_xi_ab = op_norm(xi);
  r.norm_gamma_c = op_norm(g.topRightCorner(na, na));
  r.covariance_proxy = 0.5 * r.norm_gamma_c;
  r.mutual_info_bits = fermion_mutual_information(gamma, a, b).bits;

  const double gap = std::min(1.0 - r.norm_gamma_ab, 1.0 - r.norm_xi_ab);
  const double inf = std::numeric_limits<double>::infinity();
  r.vacuous = !(gap > kEigenFloor);
  const double prefactor = r.vacuous ? inf : -4.0 * r.n * std::log(gap);
  auto bound = [&](double c) { return c == 0.0 && !r.vacuous ? 0.0 : prefactor * c; };
  r.bound = r.vacuous ? inf : bound(r.covariance_proxy);
  r.slack = r.bound - r.mutual_info_bits;
  if (covariance) {
    r.covariance = covariance;
    r.bound_with_covariance = r.vacuous ? inf : bound(*covariance);
    r.slack_with_covariance = *r.bound_with_covariance - r.mutual_info_bits;
  }
  return r;
}

namespace {

// -Re mu over the drift spectrum, ascending.
std::vector<double> decay_rates(const QuadraticLiouvillian& ql) {
  Eigen::EigenSolver<RealMatrix> es(ql.drift(), false);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("drift eigenvalues did not converge");
  std::vector<double> rates;
  for (long k = 0; k < es.eigenvalues().size(); ++k) rates.push_back(-es.eigenvalues()(k).real());
  std::sort(rates.begin(), rates.end());
  if (!(rates.front() > kStabilityTol * std::max(1.0, max_abs(ql.drift()))))
    throw NotStable("drift has an eigenvalue with real part " + std::to_string(-rates.front()));
  return rates;
}

}  // namespace

double fermion_gap(const QuadraticLiouvillian& ql) { return decay_rates(ql).front(); }

double covariance_decay_rate(const QuadraticLiouvillian& ql) {
  const auto rates = decay_rates(ql);
  return rates[0] + rates[1];
}

}  // namespace qmix
