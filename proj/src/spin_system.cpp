#include "qmix/spin_system.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include "qmix/errors.hpp"
#include "qmix/linalg.hpp"

namespace qmix {

namespace {

long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_support(std::span<const int> support, int n_sites) {
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= n_sites)
      throw DimensionMismatch("support site " + std::to_string(support[i]) + " out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (support[i] == support[j]) throw DimensionMismatch("repeated site in support");
  }
}

// Strides of each site in the full index (site 0 most significant).
std::vector<long> site_strides(int n_sites, int local_dim) {
  std::vector<long> s(n_sites);
  long acc = 1;
  for (int q = n_sites - 1; q >= 0; --q) {
    s[q] = acc;
    acc *= local_dim;
  }
  return s;
}

// Offsets in the full index of every configuration of `sites`, enumerated
// with sites[0] most significant.
std::vector<long> config_offsets(std::span<const int> sites, const std::vector<long>& strides,
                                 int local_dim) {
  std::vector<long> off{0};
  for (int q : sites) {
    std::vector<long> next;
    next.reserve(off.size() * local_dim);
    for (long o : off)
      for (int a = 0; a < local_dim; ++a) next.push_back(o + a * strides[q]);
    off = std::move(next);
  }
  return off;
}

std::vector<int> complement_sites(std::span<const int> sites, int n_sites) {
  std::vector<int> rest;
  for (int q = 0; q < n_sites; ++q)
    if (std::find(sites.begin(), sites.end(), q) == sites.end()) rest.push_back(q);
  return rest;
}

std::vector<int> positions_in(const Region& inner, const Region& outer) {
  std::vector<int> pos;
  for (int s : inner.sites()) {
    auto it = std::lower_bound(outer.sites().begin(), outer.sites().end(), s);
    if (it == outer.sites().end() || *it != s) throw SupportNotContained("site not in region");
    pos.push_back(static_cast<int>(it - outer.sites().begin()));
  }
  return pos;
}

Matrix embed_in_region(const Matrix& op, const Region& inner, const Region& outer,
                       int local_dim) {
  auto pos = positions_in(inner, outer);
  return embed_matrix(op, pos, static_cast<int>(outer.size()), local_dim);
}

void check_term(const LocalTerm& t, int local_dim) {
  if (t.support.empty()) throw EmptyRegion("local term with empty support");
  const long d = ipow(local_dim, static_cast<int>(t.support.size()));
  auto check = [&](const Matrix& m, const char* what) {
    if (m.rows() != d || m.cols() != d)
      throw DimensionMismatch(std::string(what) + " has dimension " + std::to_string(m.rows()) +
                              ", support needs " + std::to_string(d));
  };
  if (t.hamiltonian) {
    check(*t.hamiltonian, "hamiltonian");
    if (hermiticity_defect(*t.hamiltonian) > 1e-10 * (1.0 + t.hamiltonian->norm()))
      throw ShapeMismatch("local hamiltonian is not Hermitian");
  }
  for (const auto& j : t.jumps) check(j, "jump operator");
}

SparseMatrix hamiltonian_part(const SparseMatrix& h, long d) {
  SparseMatrix id = sparse_identity(d);
  SparseMatrix ht = h.transpose();
  SparseMatrix out = kron(id, h) - kron(ht, id);
  return out * cplx(0.0, -1.0);
}

SparseMatrix jump_part(const SparseMatrix& l, long d) {
  SparseMatrix id = sparse_identity(d);
  SparseMatrix ldl = SparseMatrix(l.adjoint()) * l;
  SparseMatrix ldl_t = ldl.transpose();
  SparseMatrix lc = l.conjugate();
  SparseMatrix out = kron(lc, l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl_t, id);
  return out;
}

}  // namespace

DenseOperator::DenseOperator(Matrix entries, std::vector<int> site_dims)
    : m_(std::move(entries)), dims_(std::move(site_dims)) {
  if (m_.rows() != m_.cols()) throw ShapeMismatch("operator matrix is not square");
  long prod = 1;
  for (int d : dims_) {
    if (d < 1) throw DimensionMismatch("site dimensions must be positive");
    prod *= d;
  }
  if (prod != m_.rows())
    throw DimensionMismatch("matrix dimension " + std::to_string(m_.rows()) +
                            " differs from product of site dimensions " + std::to_string(prod));
}

DenseOperator DenseOperator::on_sites(Matrix entries, int sites, int local_dim) {
  return DenseOperator(std::move(entries), std::vector<int>(sites, local_dim));
}

bool DenseOperator::is_hermitian(double tol) const { return hermiticity_defect(m_) <= tol; }

bool DenseOperator::is_state(double tol) const {
  if (!is_hermitian(tol)) return false;
  if (std::abs(m_.trace() - cplx(1.0)) > tol) return false;
  return hermitian_eigenvalues(m_).minCoeff() >= -tol;
}

namespace pauli {
Matrix identity() { return Matrix::Identity(2, 2); }
Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
Matrix lowering() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}
Matrix string(std::string_view letters) {
  Matrix out = Matrix::Identity(1, 1);
  for (char c : letters) {
    Matrix p;
    switch (c) {
      case 'I': p = identity(); break;
      case 'X': p = x(); break;
      case 'Y': p = y(); break;
      case 'Z': p = z(); break;
      default: throw ShapeMismatch(std::string("unknown Pauli letter '") + c + "'");
    }
    out = kron(out, p);
  }
  return out;
}
}  // namespace pauli

SparseMatrix embed_sparse(const Matrix& op, std::span<const int> support, int n_sites,
                          int local_dim) {
  check_support(support, n_sites);
  const long k = ipow(local_dim, static_cast<int>(support.size()));
  if (op.rows() != k || op.cols() != k)
    throw DimensionMismatch("operator of dimension " + std::to_string(op.rows()) +
                            " does not match support of " + std::to_string(support.size()) +
                            " sites");
  std::vector<int> sorted(support.begin(), support.end());
  std::sort(sorted.begin(), sorted.end());
  auto strides = site_strides(n_sites, local_dim);
  auto sub = config_offsets(sorted, strides, local_dim);
  auto rest = config_offsets(complement_sites(sorted, n_sites), strides, local_dim);
  const long dim = ipow(local_dim, n_sites);
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(rest.size() * static_cast<std::size_t>((op.array() != cplx(0.0)).count()));
  for (long c = 0; c < k; ++c)
    for (long r = 0; r < k; ++r) {
      const cplx v = op(r, c);
      if (v == cplx(0.0)) continue;
      for (long o : rest) trip.emplace_back(o + sub[r], o + sub[c], v);
    }
  SparseMatrix out(dim, dim);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Matrix embed_matrix(const Matrix& op, std::span<const int> support, int n_sites, int local_dim) {
  return Matrix(embed_sparse(op, support, n_sites, local_dim));
}

DenseOperator embed_local(const DenseOperator& op, const Region& support,
                          const Lattice& lattice) {
  if (!(support.lattice() == lattice)) throw DimensionMismatch("support on a different lattice");
  const int local_dim = op.site_dims().empty() ? 2 : op.site_dims().front();
  for (int d : op.site_dims())
    if (d != local_dim) throw DimensionMismatch("embedding needs uniform site dimensions");
  if (op.sites() != static_cast<int>(support.size()))
    throw DimensionMismatch("operator acts on " + std::to_string(op.sites()) +
                            " sites but support has " + std::to_string(support.size()));
  return DenseOperator::on_sites(
      embed_matrix(op.matrix(), support.sites(), lattice.size(), local_dim), lattice.size(),
      local_dim);
}

Matrix reduce(const Matrix& op, std::span<const int> keep, int n_sites, int local_dim) {
  check_support(keep, n_sites);
  if (op.rows() != ipow(local_dim, n_sites)) throw DimensionMismatch("operator size");
  auto strides = site_strides(n_sites, local_dim);
  auto kept = config_offsets(keep, strides, local_dim);
  auto rest = config_offsets(complement_sites(keep, n_sites), strides, local_dim);
  const long k = static_cast<long>(kept.size());
  Matrix out = Matrix::Zero(k, k);
  for (long b = 0; b < k; ++b)
    for (long a = 0; a < k; ++a) {
      cplx acc = 0.0;
      for (long o : rest) acc += op(kept[a] + o, kept[b] + o);
      out(a, b) = acc;
    }
  return out;
}

DenseOperator partial_trace(const DenseOperator& state, const Region& keep) {
  const int local_dim = state.site_dims().empty() ? 2 : state.site_dims().front();
  return DenseOperator::on_sites(reduce(state.matrix(), keep.sites(), state.sites(), local_dim),
                                 static_cast<int>(keep.size()), local_dim);
}

Matrix local_superop(const LocalTerm& term, int local_dim) {
  check_term(term, local_dim);
  const long d = ipow(local_dim, static_cast<int>(term.support.size()));
  SparseMatrix out(d * d, d * d);
  if (term.hamiltonian) out += hamiltonian_part(to_sparse(*term.hamiltonian), d);
  for (const auto& j : term.jumps) out += jump_part(to_sparse(j), d);
  return Matrix(out);
}

struct Liouvillian::Cache {
  std::once_flag once;
  SparseMatrix schroedinger;
  SparseMatrix heisenberg;
  SparseMatrix dissipative;
  SparseMatrix coherent;
  Matrix hamiltonian;
};

Liouvillian::Liouvillian(Lattice lattice, std::vector<LocalTerm> terms, int local_dim)
    : lattice_(std::move(lattice)),
      terms_(std::move(terms)),
      local_dim_(local_dim),
      dim_(ipow(local_dim, lattice_.size())),
      cache_(std::make_shared<Cache>()) {
  if (local_dim < 2) throw DimensionMismatch("local dimension must be at least 2");
  for (const auto& t : terms_) {
    if (!(t.support.lattice() == lattice_))
      throw DimensionMismatch("term support lives on a different lattice");
    check_term(t, local_dim_);
  }
}

const Liouvillian::Cache& Liouvillian::assembled() const {
  std::call_once(cache_->once, [this] {
    Cache& c = *cache_;
    const int n = lattice_.size();
    SparseMatrix h(dim_, dim_);
    c.dissipative = SparseMatrix(dim_ * dim_, dim_ * dim_);
    for (const auto& t : terms_) {
      if (t.hamiltonian) h += embed_sparse(*t.hamiltonian, t.support.sites(), n, local_dim_);
      for (const auto& j : t.jumps)
        c.dissipative += jump_part(embed_sparse(j, t.support.sites(), n, local_dim_), dim_);
    }
    h.prune(cplx(0.0));
    c.hamiltonian = Matrix(h);
    c.coherent = hamiltonian_part(h, dim_);
    c.schroedinger = c.coherent + c.dissipative;
    c.schroedinger.prune(cplx(0.0));
    c.heisenberg = c.schroedinger.adjoint();
  });
  return *cache_;
}

const SparseMatrix& Liouvillian::superop() const { return assembled().schroedinger; }
const SparseMatrix& Liouvillian::heisenberg_superop() const { return assembled().heisenberg; }
const SparseMatrix& Liouvillian::dissipative_superop() const { return assembled().dissipative; }
const SparseMatrix& Liouvillian::hamiltonian_superop() const { return assembled().coherent; }
const Matrix& Liouvillian::hamiltonian() const { return assembled().hamiltonian; }

Matrix Liouvillian::apply(const Matrix& op, Picture picture) const {
  if (op.rows() != dim_ || op.cols() != dim_) throw DimensionMismatch("operand dimension");
  const SparseMatrix& s = picture == Picture::schroedinger ? superop() : heisenberg_superop();
  return unvec(s * vec(op), dim_);
}

std::vector<std::pair<double, Matrix>> bohr_components(const Matrix& hamiltonian,
                                                        const Matrix& coupling) {
  const long d = hamiltonian.rows();
  if (coupling.rows() != d || coupling.cols() != d)
    throw DimensionMismatch("coupling and Hamiltonian dimensions differ");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hamiltonian + hamiltonian.adjoint()));
  const RealVector& e = es.eigenvalues();
  const Matrix& v = es.eigenvectors();
  const double tol = 1e-8 * e.cwiseAbs().maxCoeff();

  // Energy lowered by a transition j -> i is e_j - e_i.
  std::vector<std::pair<double, long>> gaps;
  gaps.reserve(d * d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < d; ++i) gaps.emplace_back(e(j) - e(i), j * d + i);
  std::sort(gaps.begin(), gaps.end());

  std::vector<long> cluster(d * d);
  std::vector<double> centers;
  std::size_t start = 0;
  for (std::size_t k = 1; k <= gaps.size(); ++k) {
    if (k < gaps.size() && gaps[k].first - gaps[k - 1].first <= tol) continue;
    const double lo = gaps[start].first, hi = gaps[k - 1].first;
    if (hi - lo > 10.0 * tol)
      throw DegenerateBinning("Bohr frequencies spread over " + std::to_string(hi - lo) +
                              " within one bin");
    double center = 0.5 * (lo + hi);
    if (std::abs(center) <= tol) center = 0.0;
    if (!centers.empty() && center - centers.back() < 100.0 * tol)
      throw DegenerateBinning("Bohr frequencies " + std::to_string(centers.back()) + " and " +
                              std::to_string(center) + " are nearly equal");
    for (std::size_t m = start; m < k; ++m) cluster[gaps[m].second] = static_cast<long>(centers.size());
    centers.push_back(center);
    start = k;
  }

  Matrix a = v.adjoint() * coupling * v;
  const double scale = std::max(1.0, a.norm());
  std::vector<Matrix> masked(centers.size(), Matrix::Zero(d, d));
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < d; ++i) masked[cluster[j * d + i]](i, j) = a(i, j);

  std::vector<std::pair<double, Matrix>> out;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (masked[c].norm() <= 1e-14 * scale) continue;
    out.emplace_back(centers[c], v * masked[c] * v.adjoint());
  }
  return out;
}

namespace {

std::vector<Matrix> davies_jumps(const Matrix& h, const Matrix& coupling, double beta,
                                 double eta0) {
  if (hermiticity_defect(coupling) > 1e-10 * (1.0 + coupling.norm()))
    throw ShapeMismatch("coupling operator is not Hermitian");
  std::vector<Matrix> jumps;
  for (auto& [omega, s] : bohr_components(h, coupling)) {
    const double rate = eta0 * std::exp(0.5 * beta * omega);
    jumps.push_back(std::sqrt(rate) * s);
  }
  return jumps;
}

void check_rates(double beta, double eta0) {
  if (!(beta >= 0.0)) throw ShapeMismatch("beta must be nonnegative");
  if (!(eta0 > 0.0)) throw ShapeMismatch("eta0 must be positive");
}

}  // namespace

Liouvillian davies_generator(const Lattice& lattice, const DenseOperator& hamiltonian,
                             const std::vector<std::pair<Matrix, Region>>& couplings,
                             double beta, double eta0, int local_dim) {
  check_rates(beta, eta0);
  const long dim = ipow(local_dim, lattice.size());
  if (hamiltonian.dim() != dim) throw DimensionMismatch("Hamiltonian dimension");
  if (!hamiltonian.is_hermitian(1e-10 * (1.0 + hamiltonian.matrix().norm())))
    throw ShapeMismatch("Hamiltonian is not Hermitian");
  Region all = Region::all(lattice);
  std::vector<LocalTerm> terms;
  terms.push_back(LocalTerm{all, hamiltonian.matrix(), {}});
  for (const auto& [op, region] : couplings) {
    Matrix full = embed_matrix(op, region.sites(), lattice.size(), local_dim);
    terms.push_back(LocalTerm{all, std::nullopt, davies_jumps(hamiltonian.matrix(), full, beta, eta0)});
  }
  return Liouvillian(lattice, std::move(terms), local_dim);
}

Liouvillian davies_generator(const Lattice& lattice, const std::vector<LocalTerm>& hamiltonian,
                             const std::vector<std::pair<Matrix, Region>>& couplings,
                             double beta, double eta0, int local_dim) {
  check_rates(beta, eta0);
  std::vector<const LocalTerm*> hs;
  for (const auto& t : hamiltonian)
    if (t.hamiltonian) hs.push_back(&t);

  bool commuting = true;
  for (std::size_t i = 0; i < hs.size() && commuting; ++i)
    for (std::size_t j = 0; j < i && commuting; ++j) {
      if (!hs[i]->support.intersects(hs[j]->support)) continue;
      Region u = hs[i]->support.unite(hs[j]->support);
      Matrix a = embed_in_region(*hs[i]->hamiltonian, hs[i]->support, u, local_dim);
      Matrix b = embed_in_region(*hs[j]->hamiltonian, hs[j]->support, u, local_dim);
      commuting = (a * b - b * a).norm() <= 1e-12 * (1.0 + a.norm() * b.norm());
    }

  if (!commuting) {
    Liouvillian tmp(lattice, hamiltonian, local_dim);
    return davies_generator(lattice, DenseOperator::on_sites(tmp.hamiltonian(), lattice.size(), local_dim),
                            couplings, beta, eta0, local_dim);
  }

  std::vector<LocalTerm> terms;
  for (const LocalTerm* t : hs) terms.push_back(LocalTerm{t->support, t->hamiltonian, {}});
  for (const auto& [op, region] : couplings) {
    Region r = region;
    for (const LocalTerm* t : hs)
      if (t->support.intersects(region)) r = r.unite(t->support);
    const long d = ipow(local_dim, static_cast<int>(r.size()));
    Matrix h = Matrix::Zero(d, d);
    for (const LocalTerm* t : hs)
      if (t->support.intersects(region))
        h += embed_in_region(*t->hamiltonian, t->support, r, local_dim);
    Matrix a = embed_in_region(op, region, r, local_dim);
    terms.push_back(LocalTerm{r, std::nullopt, davies_jumps(h, a, beta, eta0)});
  }
  return Liouvillian(lattice, std::move(terms), local_dim);
}

Matrix evolve(const Liouvillian& l, const Matrix& operand, double t, Picture picture) {
  if (!(t >= 0.0)) throw ShapeMismatch("evolution time must be nonnegative");
  const long d = l.dim();
  if (operand.rows() != d || operand.cols() != d) throw DimensionMismatch("operand dimension");
  if (t == 0.0) return operand;
  const SparseMatrix& s = picture == Picture::schroedinger ? l.superop() : l.heisenberg_superop();
  if (d <= kDenseDim) {
    Matrix prop = (Matrix(s) * t).exp();
    return unvec(prop * vec(operand), d);
  }
  return unvec(expmv(s, vec(operand), t), d);
}

DenseOperator evolve(const Liouvillian& l, const DenseOperator& operand, double t,
                     Picture picture) {
  return DenseOperator(evolve(l, operand.matrix(), t, picture), operand.site_dims());
}

namespace {

struct NullSpace {
  int dim = 0;
  Matrix state;
};

Matrix normalize_state(const Vector& v, long d) {
  Matrix rho = unvec(v, d);
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-300) return Matrix::Zero(d, d);
  rho /= tr;
  return 0.5 * (rho + rho.adjoint());
}

NullSpace dense_null_space(const Liouvillian& l) {
  const long d = l.dim();
  Matrix s(l.superop());
  Eigen::BDCSVD<Matrix> svd(s, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv(0));
  NullSpace ns;
  for (long i = 0; i < sv.size(); ++i) ns.dim += sv(i) <= tol;
  if (ns.dim == 1) ns.state = normalize_state(svd.matrixV().col(sv.size() - 1), d);
  return ns;
}

Vector constrained_solve(const SparseMatrix& s, long d, long row, bool& ok) {
  const long n = s.rows();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(s.nonZeros() + d);
  for (long k = 0; k < s.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(s, k); it; ++it)
      if (it.row() != row) trip.emplace_back(it.row(), it.col(), it.value());
  for (long i = 0; i < d; ++i) trip.emplace_back(row, i * (d + 1), 1.0);
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(m);
  ok = lu.info() == Eigen::Success;
  if (!ok) return Vector::Zero(n);
  Vector rhs = Vector::Zero(n);
  rhs(row) = 1.0;
  Vector x = lu.solve(rhs);
  ok = lu.info() == Eigen::Success && x.allFinite() && (m * x - rhs).norm() <= 1e-8;
  return x;
}

NullSpace sparse_null_space(const Liouvillian& l) {
  const long d = l.dim();
  const SparseMatrix& s = l.superop();
  bool ok1 = false, ok2 = false;
  Vector x1 = constrained_solve(s, d, 0, ok1);
  Vector x2 = constrained_solve(s, d, (d - 1) * (d + 1), ok2);
  NullSpace ns;
  // With a null space of dimension k >= 2 the constrained systems are
  // singular, so the two solves fail or disagree.
  if (!ok1 || !ok2 || (x1 - x2).norm() > 1e-7 * std::max(1.0, x1.norm())) {
    ns.dim = 2;
    return ns;
  }
  const double scale = std::max(1.0, norm1(s));
  if ((s * x1).norm() > 1e-9 * scale * std::max(1.0, x1.norm())) {
    throw ConvergenceFailure("stationary solve residual too large");
  }
  ns.dim = 1;
  ns.state = normalize_state(x1, d);
  return ns;
}

NullSpace null_space(const Liouvillian& l) {
  return l.dim() <= kDenseDim ? dense_null_space(l) : sparse_null_space(l);
}

}  // namespace

PrimitivityReport is_primitive(const Liouvillian& l) {
  NullSpace ns = null_space(l);
  PrimitivityReport r;
  r.null_dim = ns.dim;
  if (ns.dim == 1) {
    r.min_eigenvalue = hermitian_eigenvalues(ns.state).minCoeff();
    r.primitive = r.min_eigenvalue > rank_tol(l.dim());
  }
  return r;
}

DenseOperator stationary_state(const Liouvillian& l) {
  NullSpace ns = null_space(l);
  if (ns.dim != 1)
    throw NotPrimitive("stationary space has dimension " +
                       std::string(ns.dim >= 2 ? ">= 2" : std::to_string(ns.dim)));
  const double m = hermitian_eigenvalues(ns.state).minCoeff();
  if (!(m > rank_tol(l.dim())))
    throw NotPrimitive("stationary state is not full rank (min eigenvalue " + std::to_string(m) +
                       ")");
  return DenseOperator::on_sites(ns.state, l.lattice().size(), l.local_dim());
}

Liouvillian restrict_to_region(const Liouvillian& l, const Region& b) {
  if (b.empty()) throw EmptyRegion("restriction to an empty region");
  std::vector<LocalTerm> kept;
  for (const auto& t : l.terms())
    if (t.support.subset_of(b)) kept.push_back(t);
  return Liouvillian(l.lattice(), std::move(kept), l.local_dim());
}

Liouvillian strip_boundary(const Liouvillian& l, const Region& a, const Region& b) {
  std::vector<Region> supports;
  for (const auto& t : l.terms()) supports.push_back(t.support);
  auto cut = separating_boundary(a, b, supports);
  std::vector<LocalTerm> kept;
  std::size_t next = 0;
  for (std::size_t k = 0; k < l.terms().size(); ++k) {
    if (next < cut.size() && cut[next] == k) {
      ++next;
      continue;
    }
    kept.push_back(l.terms()[k]);
  }
  return Liouvillian(l.lattice(), std::move(kept), l.local_dim());
}

}  // namespace qmix
