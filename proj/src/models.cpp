#include "qmix/models.hpp"

#include <cmath>

#include "qmix/linalg.hpp"

namespace qmix::models {

namespace {

Liouvillian single_site_jumps(int sites, const std::vector<Matrix>& jumps) {
  Lattice lat = Lattice::chain(sites);
  std::vector<LocalTerm> terms;
  for (int i = 0; i < sites; ++i) terms.push_back(LocalTerm{Region::single(lat, i), std::nullopt, jumps});
  return Liouvillian(lat, std::move(terms));
}

}  // namespace

Liouvillian depolarizing(int sites, double gamma) {
  const double a = std::sqrt(gamma / 4.0);
  return single_site_jumps(sites, {a * pauli::x(), a * pauli::y(), a * pauli::z()});
}

Liouvillian dephasing(int sites, double gamma) {
  return single_site_jumps(sites, {std::sqrt(gamma) * pauli::z()});
}

Liouvillian amplitude_damping(int sites, double gamma) {
  return single_site_jumps(sites, {std::sqrt(gamma) * pauli::lowering()});
}

Liouvillian davies_qubit(double beta, double eta0) {
  Lattice lat = Lattice::chain(1);
  return davies_generator(lat, DenseOperator::on_sites(pauli::z(), 1),
                          {{pauli::x(), Region::single(lat, 0)}}, beta, eta0);
}

std::vector<LocalTerm> ising_terms(const Lattice& chain, double field, double zz) {
  std::vector<LocalTerm> terms;
  for (int i = 0; i < chain.size(); ++i)
    terms.push_back(LocalTerm{Region::single(chain, i), Matrix(field * pauli::z()), {}});
  for (int i = 0; i + 1 < chain.size(); ++i)
    terms.push_back(LocalTerm{Region(chain, {i, i + 1}), Matrix(zz * pauli::string("ZZ")), {}});
  return terms;
}

Liouvillian davies_ising_chain(int sites, double field, double zz, double beta, double eta0) {
  Lattice lat = Lattice::chain(sites);
  std::vector<std::pair<Matrix, Region>> couplings;
  for (int i = 0; i < sites; ++i) couplings.emplace_back(pauli::x(), Region::single(lat, i));
  return davies_generator(lat, ising_terms(lat, field, zz), couplings, beta, eta0);
}

Liouvillian davies_transverse_chain(int sites, double field, double xx, double beta,
                                    double eta0) {
  Lattice lat = Lattice::chain(sites);
  std::vector<LocalTerm> h;
  for (int i = 0; i < sites; ++i)
    h.push_back(LocalTerm{Region::single(lat, i), Matrix(field * pauli::z()), {}});
  for (int i = 0; i + 1 < sites; ++i)
    h.push_back(LocalTerm{Region(lat, {i, i + 1}), Matrix(xx * pauli::string("XX")), {}});
  std::vector<std::pair<Matrix, Region>> couplings;
  for (int i = 0; i < sites; ++i) couplings.emplace_back(pauli::x(), Region::single(lat, i));
  return davies_generator(lat, h, couplings, beta, eta0);
}

Liouvillian hopping_chain(int sites, double hop, double field, double loss, double gain) {
  Lattice lat = Lattice::chain(sites);
  std::vector<LocalTerm> terms;
  Matrix down = pauli::lowering();
  Matrix up = down.adjoint();
  for (int i = 0; i < sites; ++i) {
    std::vector<Matrix> jumps;
    if (loss > 0) jumps.push_back(std::sqrt(loss) * down);
    if (gain > 0) jumps.push_back(std::sqrt(gain) * up);
    terms.push_back(LocalTerm{Region::single(lat, i), Matrix(field * pauli::z()), jumps});
  }
  Matrix bond = 0.5 * hop * (pauli::string("XX") + pauli::string("YY"));
  for (int i = 0; i + 1 < sites; ++i)
    terms.push_back(LocalTerm{Region(lat, {i, i + 1}), bond, {}});
  return Liouvillian(lat, std::move(terms));
}

}  // namespace qmix::models
