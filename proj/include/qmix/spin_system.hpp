#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qmix/lattice.hpp"
#include "qmix/types.hpp"

namespace qmix {

/// Complex square matrix with the local dimensions of the sites it acts on.
class DenseOperator {
 public:
  DenseOperator() = default;
  DenseOperator(Matrix entries, std::vector<int> site_dims);
  /// Operator on `sites` sites of dimension `local_dim`.
  static DenseOperator on_sites(Matrix entries, int sites, int local_dim = 2);

  const Matrix& matrix() const { return m_; }
  const std::vector<int>& site_dims() const { return dims_; }
  long dim() const { return m_.rows(); }
  int sites() const { return static_cast<int>(dims_.size()); }

  bool is_hermitian(double tol = 1e-10) const;
  /// Hermitian, unit trace and positive semidefinite within `tol`.
  bool is_state(double tol = 1e-10) const;

 private:
  Matrix m_;
  std::vector<int> dims_;
};

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
/// |1><0| with Z|0> = |0>, which lowers the sigma_z eigenvalue from +1 to -1.
Matrix lowering();
/// Tensor product of single-site Paulis, e.g. "XZI". Site 0 is the leftmost letter.
Matrix string(std::string_view letters);
}  // namespace pauli

/// Full operator acting as `op` on `support` (taken in sorted order) and
/// identity elsewhere. Site 0 is the most significant tensor factor.
Matrix embed_matrix(const Matrix& op, std::span<const int> support, int n_sites, int local_dim);
SparseMatrix embed_sparse(const Matrix& op, std::span<const int> support, int n_sites,
                          int local_dim);
DenseOperator embed_local(const DenseOperator& op, const Region& support, const Lattice& lattice);

/// Reduced operator on the listed sites, with tensor factors in the listed order.
Matrix reduce(const Matrix& op, std::span<const int> keep, int n_sites, int local_dim);
DenseOperator partial_trace(const DenseOperator& state, const Region& keep);

/// A Hamiltonian piece and jump operators acting on a common support. The
/// matrices act on the support's sites in sorted order.
struct LocalTerm {
  Region support;
  std::optional<Matrix> hamiltonian;
  std::vector<Matrix> jumps;
};

enum class Picture { schroedinger, heisenberg };

/// Sum of local terms on a lattice of `local_dim`-dimensional sites. The
/// superoperator acts on column-stacked operators and is assembled once on
/// first use; copies share the assembled matrices.
class Liouvillian {
 public:
  Liouvillian(Lattice lattice, std::vector<LocalTerm> terms, int local_dim = 2);

  const Lattice& lattice() const { return lattice_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  int local_dim() const { return local_dim_; }
  /// Hilbert-space dimension d.
  long dim() const { return dim_; }

  /// Matrix of rho -> -i[H, rho] + sum_j (L rho L^dag - {L^dag L, rho}/2).
  const SparseMatrix& superop() const;
  /// Matrix of f -> i[H, f] + sum_j (L^dag f L - {L^dag L, f}/2), the adjoint of superop().
  const SparseMatrix& heisenberg_superop() const;
  /// Superoperator of the jump terms alone.
  const SparseMatrix& dissipative_superop() const;
  /// Superoperator of the coherent part alone.
  const SparseMatrix& hamiltonian_superop() const;
  /// Global Hamiltonian.
  const Matrix& hamiltonian() const;

  Matrix apply(const Matrix& op, Picture picture = Picture::schroedinger) const;

 private:
  struct Cache;
  Lattice lattice_;
  std::vector<LocalTerm> terms_;
  int local_dim_;
  long dim_;
  std::shared_ptr<Cache> cache_;
  const Cache& assembled() const;
};

/// Local superoperator of one term on its support.
Matrix local_superop(const LocalTerm& term, int local_dim);

/// Thermal generator with jumps S_k(omega) that lower the energy by omega,
/// rates eta0 e^{beta omega / 2} and the Hamiltonian commutator. `couplings`
/// are Hermitian operators on their regions.
Liouvillian davies_generator(const Lattice& lattice, const DenseOperator& hamiltonian,
                             const std::vector<std::pair<Matrix, Region>>& couplings,
                             double beta, double eta0, int local_dim = 2);

/// Same, with the Hamiltonian given as local terms. When the terms commute
/// pairwise each jump is built from the terms overlapping its coupling, so
/// the generator stays local; otherwise the global Hamiltonian is used.
Liouvillian davies_generator(const Lattice& lattice, const std::vector<LocalTerm>& hamiltonian,
                             const std::vector<std::pair<Matrix, Region>>& couplings,
                             double beta, double eta0, int local_dim = 2);

/// Bohr decomposition of a Hermitian coupling: pairs (omega, S(omega)) with
/// [H, S(omega)] = -omega S(omega); zero components are omitted.
std::vector<std::pair<double, Matrix>> bohr_components(const Matrix& hamiltonian,
                                                        const Matrix& coupling);

DenseOperator evolve(const Liouvillian& l, const DenseOperator& operand, double t,
                     Picture picture = Picture::schroedinger);
Matrix evolve(const Liouvillian& l, const Matrix& operand, double t,
              Picture picture = Picture::schroedinger);

struct PrimitivityReport {
  bool primitive = false;
  int null_dim = 0;
  double min_eigenvalue = 0.0;
};

PrimitivityReport is_primitive(const Liouvillian& l);
DenseOperator stationary_state(const Liouvillian& l);

Liouvillian restrict_to_region(const Liouvillian& l, const Region& b);
Liouvillian strip_boundary(const Liouvillian& l, const Region& a, const Region& b);

/// Largest Hilbert-space dimension handled by dense superoperator algebra.
inline constexpr long kDenseDim = 16;

}  // namespace qmix
