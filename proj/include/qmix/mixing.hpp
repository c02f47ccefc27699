#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qmix/spin_system.hpp"

namespace qmix {

/// Full-rank state sigma, weight s in [0, 1] and the cached eigendecomposition
/// sigma = V diag(p) V^dag.
class WeightedContext {
 public:
  WeightedContext(const DenseOperator& sigma, double s);
  WeightedContext(const Matrix& sigma, double s);

  const Matrix& sigma() const { return sigma_; }
  double s() const { return s_; }
  /// Ascending eigenvalues of sigma.
  const RealVector& eigenvalues() const { return p_; }
  const Matrix& eigenvectors() const { return v_; }
  long dim() const { return sigma_.rows(); }

  /// sigma^x through the eigendecomposition.
  Matrix power(double x) const;
  Matrix log_sigma() const;
  /// Gamma(f) = (sigma^s f sigma^{1-s} + sigma^{1-s} f sigma^s) / 2.
  Matrix gamma(const Matrix& f) const;
  /// <f, g>_s = tr[f^dag Gamma(g)].
  cplx inner(const Matrix& f, const Matrix& g) const;
  /// Weights w_ij of Gamma in the eigenbasis: Gamma(f)~_ij = w_ij f~_ij.
  RealMatrix weights() const;

  Matrix to_eigenbasis(const Matrix& f) const { return v_.adjoint() * f * v_; }
  Matrix from_eigenbasis(const Matrix& f) const { return v_ * f * v_.adjoint(); }

 private:
  Matrix sigma_;
  double s_;
  RealVector p_;
  Matrix v_;
};

Matrix gamma_s(const WeightedContext& ctx, const Matrix& f);

struct ReversibilityCheck {
  bool reversible = false;
  /// Operator norm of Gamma L^* - L Gamma.
  double residual = 0.0;
  /// Norm scale the residual is compared against.
  double scale = 0.0;
};

/// Detailed balance Gamma L^* = L Gamma, tested on the dissipative part unless
/// `include_hamiltonian` is set.
ReversibilityCheck check_s_reversibility(const Liouvillian& l, const WeightedContext& ctx,
                                         bool include_hamiltonian = false, double tol = 1e-10);

/// Var(f) = |tr[f Gamma(f)] - tr[sigma f]^2|.
double variance_s(const WeightedContext& ctx, const Matrix& f);

/// Ent(f) = tr[Gamma(f)(log Gamma(f) - log sigma)] - tr[Gamma(f)] log tr[Gamma(f)], in nats.
double entropy_s(const WeightedContext& ctx, const Matrix& f);

/// Decay-rate convention: lambda_s = inf <f, -L^* f>_s / Var(f), so that
/// Var(f_t) <= Var(f) e^{-2 lambda_s t}.
double chi2_constant(const Liouvillian& l, const WeightedContext& ctx);

enum class GapMethod { automatic, dense, lanczos, arnoldi };

struct GapResult {
  double gap = 0.0;
  /// (s, lambda_s) pairs.
  std::vector<std::pair<double, double>> chi2;
  /// Dissipative part reversible and commuting with the coherent part, so
  /// that lambda_s must equal the gap.
  bool reversible = false;
  /// max_s |lambda_s - gap| / gap.
  double chi2_mismatch = 0.0;
  GapMethod method = GapMethod::automatic;
};

/// Spectral gap, reported as a positive decay rate, plus lambda_s for the
/// requested weights.
GapResult spectral_gap(const Liouvillian& l, const std::vector<double>& s_values = {0.0, 0.5, 1.0},
                       GapMethod method = GapMethod::automatic);

struct LogSobolevOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  int threads = 0;
  /// Trial states with relative entropy below this are rejected.
  double entropy_floor = 1e-6;
  int max_iterations = 4000;
};

struct LogSobolevResult {
  /// Upper estimate of the Log-Sobolev constant: min(variational, linearized).
  double estimate = 0.0;
  /// Best ratio found by the optimizer over trial states exp(h).
  double variational = 0.0;
  /// Exact limit of the ratio as f approaches the identity.
  double linearized = 0.0;
  std::vector<double> per_restart;
};

/// Ratio (-d/dt Ent(f_t)) / (2 Ent(f)) at t = 0 with the derivative taken by
/// central differences with one Richardson step.
double log_sobolev_ratio(const Liouvillian& l, const WeightedContext& ctx, const Matrix& f);

/// Same ratio from the exact entropy production -tr[L(rho)(log rho - log sigma)],
/// rho = Gamma(f); valid for reversible generators.
double log_sobolev_ratio_exact(const Liouvillian& l, const WeightedContext& ctx, const Matrix& f);

/// Variational upper estimate of the Log-Sobolev constant (convention
/// Ent(f_t) <= Ent(f) e^{-2 alpha t}).
LogSobolevResult log_sobolev_estimate(const Liouvillian& l, const WeightedContext& ctx,
                                      const LogSobolevOptions& options = {});

/// (sqrt(inv_norm) e^{-lambda t}, sqrt(2 log inv_norm) e^{-alpha t}).
std::pair<double, double> mixing_bounds(double inv_norm, double lambda, double alpha, double t);

/// ||sigma^{-1}|| = 1 / smallest eigenvalue.
double inverse_norm(const Matrix& sigma);

struct ThermalBound {
  double lower = 0.0;
  /// d e^{beta(||H|| - ||H^{-1}||^{-1})}, valid for H > 0.
  double upper = 0.0;
  /// d e^{beta(lambda_max - lambda_min)}, valid for every Hermitian H.
  double shifted_upper = 0.0;
};

/// Two-sided bound on ||sigma^{-1}|| for the Gibbs state of a positive
/// definite H.
ThermalBound thermal_bound(const Matrix& h, double beta);
double shifted_thermal_bound(const Matrix& h, double beta);

struct MixingSummary {
  double gap = 0.0;
  std::vector<std::pair<double, double>> chi2;
  double ls_estimate = 0.0;
  double inv_norm = 0.0;
  bool reversible = false;
};

MixingSummary mixing_summary(const Liouvillian& l, const LogSobolevOptions& options = {});

}  // namespace qmix
