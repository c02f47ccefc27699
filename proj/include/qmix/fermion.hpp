#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qmix/lattice.hpp"
#include "qmix/types.hpp"

namespace qmix {

/// Majorana operators r_{2j} = (a_j + a_j^dag)/sqrt(2), r_{2j+1} = i(a_j - a_j^dag)/sqrt(2),
/// so that {r_k, r_l} = delta_kl. The covariance matrix is gamma_kl = i tr(rho [r_k, r_l]).
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;
  /// Validates antisymmetry and ||gamma|| <= 1.
  explicit CovarianceMatrix(RealMatrix gamma, double tol = 1e-10);

  const RealMatrix& gamma() const { return gamma_; }
  int modes() const { return static_cast<int>(gamma_.rows() / 2); }

 private:
  RealMatrix gamma_;
};

/// H = i r^T h r with real antisymmetric h, jumps L_j = l_j^T r.
class QuadraticLiouvillian {
 public:
  QuadraticLiouvillian(int modes, RealMatrix h, std::vector<Vector> jumps,
                       std::vector<std::vector<int>> supports = {});

  int modes() const { return modes_; }
  const RealMatrix& h() const { return h_; }
  const std::vector<Vector>& jumps() const { return jumps_; }
  /// Modes each jump acts on.
  const std::vector<std::vector<int>>& supports() const { return supports_; }

  /// X = -2h - Re(sum_j l_j l_j^dag), so that d gamma/dt = X^T gamma + gamma X + Y.
  const RealMatrix& drift() const { return drift_; }
  /// Y = 2 Im(sum_j l_j l_j^dag).
  const RealMatrix& noise() const { return noise_; }

 private:
  int modes_;
  RealMatrix h_;
  std::vector<Vector> jumps_;
  std::vector<std::vector<int>> supports_;
  RealMatrix drift_;
  RealMatrix noise_;
};

/// Quadratic Hamiltonian pieces on lattice modes.
struct QuadraticTerm {
  enum class Kind {
    /// value a_i^dag a_j + h.c.
    hopping,
    /// value a_i a_j + h.c.
    pairing,
    /// Re(value) a_i^dag a_i
    potential,
  };
  Kind kind = Kind::hopping;
  int i = 0;
  int j = 0;
  cplx value = 0.0;
};

/// L = sum u a_m + sum v a_m^dag.
struct JumpSpec {
  std::vector<std::pair<int, cplx>> lowering;
  std::vector<std::pair<int, cplx>> raising;
};

QuadraticLiouvillian build_quadratic(const Lattice& lattice, const std::vector<QuadraticTerm>& h_terms,
                                     const std::vector<JumpSpec>& jump_specs);

struct QuadraticSpec {
  std::vector<QuadraticTerm> terms;
  std::vector<JumpSpec> jumps;
};

QuadraticSpec uniform_chain_spec(int modes, double hop, double pairing, double potential,
                                double loss, double gain);

/// Chain with uniform hopping, pairing, potential and on-site loss and gain.
QuadraticLiouvillian uniform_chain(int modes, double hop, double pairing, double potential,
                                   double loss, double gain);

/// Solves X^T gamma + gamma X + Y = 0 with a real Schur decomposition.
CovarianceMatrix stationary_covariance(const QuadraticLiouvillian& ql);

/// ||X^T gamma + gamma X + Y||, Frobenius.
double lyapunov_residual(const QuadraticLiouvillian& ql, const RealMatrix& gamma);

CovarianceMatrix evolve_covariance(const QuadraticLiouvillian& ql, const CovarianceMatrix& gamma0,
                                   double t);

/// Mode values c_j in [0, 1], descending.
RealVector normal_modes(const CovarianceMatrix& gamma);

struct GaussianMinEigenvalue {
  double value = 0.0;
  /// Some c_j equals one, so the state is singular.
  bool pure = false;
};

/// prod_j (1 - c_j) / 2.
GaussianMinEigenvalue gaussian_min_eigenvalue(const CovarianceMatrix& gamma, double tol = 1e-12);

/// exp(tr log((1 - |gamma|)/2) / 2), with |gamma| = sqrt(-gamma^2). The half
/// compensates for each c_j appearing twice in the spectrum of |gamma|.
double gaussian_min_eigenvalue_trace_form(const CovarianceMatrix& gamma);

/// Rows and columns of the modes of A followed by those of B.
RealMatrix covariance_block(const CovarianceMatrix& gamma, const Region& a, const Region& b);

/// Von Neumann entropy in bits.
double mode_entropy_bits(const RealMatrix& gamma);

struct FermionMutualInformation {
  double bits = 0.0;
  double nats = 0.0;
};

/// tr s(i xi_AB) - tr s(i gamma_AB), xi_AB the block-diagonal part.
FermionMutualInformation fermion_mutual_information(const CovarianceMatrix& gamma, const Region& a,
                                                    const Region& b);

struct FermionBoundReport {
  int n = 0;
  double norm_gamma_ab = 0.0;
  double norm_xi_ab = 0.0;
  double norm_gamma_c = 0.0;
  /// ||gamma_C|| / 2, the lower bound on the covariance correlation.
  double covariance_proxy = 0.0;
  double mutual_info_bits = 0.0;
  /// -4n log(min(1 - ||gamma_AB||, 1 - ||xi_AB||)) times the proxy.
  double bound = 0.0;
  bool vacuous = false;
  double slack = 0.0;
  /// Same bound with an externally computed covariance correlation.
  std::optional<double> covariance;
  std::optional<double> bound_with_covariance;
  std::optional<double> slack_with_covariance;
  bool holds(double tol = 1e-9) const;
};

/// Mutual information against the covariance bound for |A| = |B| = n.
FermionBoundReport fermion_bound_report(const CovarianceMatrix& gamma, const Region& a,
                                        const Region& b,
                                        std::optional<double> covariance = std::nullopt);

/// Spectral gap of the Liouvillian: min(-Re mu) over the drift eigenvalues mu,
/// the decay rate of the slowest linear Majorana observable.
double fermion_gap(const QuadraticLiouvillian& ql);

/// Slowest decay rate of the covariance matrix, i.e. the gap restricted to
/// parity-even observables: the two smallest -Re mu added together.
double covariance_decay_rate(const QuadraticLiouvillian& ql);

}  // namespace qmix
