#pragma once

#include <cstdint>
#include <vector>

#include "qmix/spin_system.hpp"

namespace qmix {

struct CorrelationTriple {
  double covariance = 0.0;
  double trace_norm = 0.0;
  /// In nats.
  double mutual_info = 0.0;
  /// Hilbert-space dimension of the joint region.
  long d_ab = 0;
  /// ||rho_AB^{-1}||, +infinity when rho_AB is singular.
  double inv_norm_ab = 0.0;
};

struct CovarianceOptions {
  int restarts = 10;
  std::uint64_t seed = 0;
  int threads = 1;
  double tol = 1e-10;
  int max_iterations = 500;
};

struct CovarianceResult {
  double value = 0.0;
  /// Optimal Hermitian observables, each with eigenvalues +-1.
  Matrix f, g;
  /// |tr[(f x g) Delta]| after every half step of the winning restart.
  std::vector<double> history;
  /// Final value of each restart.
  std::vector<double> per_restart;
};

/// Joint reduced state on A then B, with A's sites as the leading factors.
Matrix reduced_pair(const DenseOperator& rho, const Region& a, const Region& b);

/// Bipartite forms, for a state on C^{d_a} x C^{d_b}.
CovarianceResult covariance_correlation(const Matrix& rho_ab, long d_a,
                                        const CovarianceOptions& options = {});
double trace_correlation(const Matrix& rho_ab, long d_a);
double mutual_information(const Matrix& rho_ab, long d_a);
CorrelationTriple correlations(const Matrix& rho_ab, long d_a,
                               const CovarianceOptions& options = {});

/// sup |tr[(f x g)(rho_AB - rho_A x rho_B)]| over Hermitian f, g of unit norm,
/// by alternating sign iteration.
double covariance_correlation(const DenseOperator& rho, const Region& a, const Region& b,
                              const CovarianceOptions& options = {});
/// ||rho_AB - rho_A x rho_B||_1.
double trace_correlation(const DenseOperator& rho, const Region& a, const Region& b);
/// S(rho_A) + S(rho_B) - S(rho_AB) in nats.
double mutual_information(const DenseOperator& rho, const Region& a, const Region& b);
CorrelationTriple correlations(const DenseOperator& rho, const Region& a, const Region& b,
                               const CovarianceOptions& options = {});

/// Both sides of T/(2 d^2) <= C <= T and T^2/2 <= I <= log||rho_AB^{-1}|| T.
struct CorrelationInequalities {
  CorrelationTriple values;
  double covariance_lower = 0.0;
  double covariance_upper = 0.0;
  double mutual_info_lower = 0.0;
  /// +infinity when rho_AB is singular.
  double mutual_info_upper = 0.0;
  bool mutual_info_upper_vacuous = false;

  double slack_covariance_lower() const { return values.covariance - covariance_lower; }
  double slack_covariance_upper() const { return covariance_upper - values.covariance; }
  double slack_mutual_info_lower() const { return values.mutual_info - mutual_info_lower; }
  double slack_mutual_info_upper() const { return mutual_info_upper - values.mutual_info; }
  bool holds(double tol = 1e-9) const;
};

CorrelationInequalities correlation_inequalities(const CorrelationTriple& values);
CorrelationInequalities correlation_inequalities(const DenseOperator& rho, const Region& a,
                                                 const Region& b,
                                                 const CovarianceOptions& options = {});

}  // namespace qmix
