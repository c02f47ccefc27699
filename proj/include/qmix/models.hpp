#pragma once

#include "qmix/spin_system.hpp"

/// Reference qubit models used by the tests, the experiments and the
/// command line front-end.
namespace qmix::models {

/// Jumps sqrt(gamma/4) sigma_{x,y,z} on every site; each site relaxes to 1/2 at rate gamma.
Liouvillian depolarizing(int sites, double gamma);

/// Jump sqrt(gamma) sigma_z on every site.
Liouvillian dephasing(int sites, double gamma);

/// Jump sqrt(gamma) |1><0| (pauli::lowering) on every site.
Liouvillian amplitude_damping(int sites, double gamma);

/// Thermal qubit: H = sigma_z, coupling sigma_x.
Liouvillian davies_qubit(double beta, double eta0 = 1.0);

/// Local terms of H = field sum_i Z_i + zz sum_i Z_i Z_{i+1}.
std::vector<LocalTerm> ising_terms(const Lattice& chain, double field, double zz);

/// Thermal Ising chain with a sigma_x coupling on every site. The
/// Hamiltonian terms commute, so every jump acts on at most three sites.
Liouvillian davies_ising_chain(int sites, double field, double zz, double beta,
                               double eta0 = 1.0);

/// Thermal chain with the non-commuting H = field sum Z_i + xx sum X_i X_{i+1}
/// and sigma_x couplings; jumps act on the whole chain.
Liouvillian davies_transverse_chain(int sites, double field, double xx, double beta,
                                    double eta0 = 1.0);

/// Hopping chain H = hop sum (X_i X_{i+1} + Y_i Y_{i+1})/2 + field sum Z_i with
/// decay pauli::lowering() at rate `loss` and pumping at rate `gain` on every site.
Liouvillian hopping_chain(int sites, double hop, double field, double loss, double gain);

}  // namespace qmix::models
