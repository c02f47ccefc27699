#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmix/fermion.hpp"
#include "qmix/spin_system.hpp"

namespace qmix {

enum class ModelKind { spin, davies, fermion };

std::string model_kind_name(ModelKind kind);

/// Sum of weighted Pauli strings plus an optional explicit matrix.
struct OperatorSpec {
  std::vector<std::pair<std::string, cplx>> paulis;
  std::optional<Matrix> matrix;
};

struct TermSpec {
  std::vector<int> sites;
  std::optional<OperatorSpec> hamiltonian;
  std::vector<OperatorSpec> jumps;
};

/// Hermitian system-bath coupling of a Davies model.
struct CouplingSpec {
  std::vector<int> sites;
  OperatorSpec op;
};

/// Shorthand for a translation-invariant fermionic chain.
struct UniformChainSpec {
  double hop = 0.0;
  double pairing = 0.0;
  double potential = 0.0;
  double loss = 0.0;
  double gain = 0.0;
};

/// Inputs of the experiments. Regions are named ("A", "B", "Y", ...).
struct ExperimentSpec {
  std::map<std::string, std::vector<int>> regions;
  std::vector<int> distances;
  /// Block lengths of the area-law sweep.
  std::vector<int> blocks;
  /// Pauli labels of light-cone probes.
  std::vector<std::string> probes;
  std::optional<TermSpec> perturbation;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
};

struct ModelFile {
  std::string name = "model";
  ModelKind kind = ModelKind::spin;
  std::vector<int> extents;
  int local_dim = 2;
  /// Full terms for spin models, Hamiltonian terms only for Davies models.
  std::vector<TermSpec> terms;
  std::vector<CouplingSpec> couplings;
  /// beta and eta0 for Davies models.
  std::map<std::string, double> parameters;
  std::optional<UniformChainSpec> uniform;
  std::vector<QuadraticTerm> quadratic;
  std::vector<JumpSpec> fermion_jumps;
  std::optional<ExperimentSpec> experiment;

  Lattice lattice() const { return Lattice(extents); }
};

/// Parses and validates JSON model text. Throws ParseError for malformed
/// JSON and ValidationError listing every schema violation.
ModelFile parse_model(std::string_view text);
ModelFile load_model(const std::filesystem::path& path);

/// Canonical JSON; parse_model(serialize_model(m)) reproduces m.
std::string serialize_model(const ModelFile& model);

Matrix operator_matrix(const OperatorSpec& op, int sites, int local_dim);

/// Generator of a spin or Davies model.
Liouvillian build_liouvillian(const ModelFile& model);
LocalTerm build_term(const ModelFile& model, const TermSpec& term);
/// Quadratic generator of a fermion model; the uniform shorthand and the
/// explicit terms are added together.
QuadraticLiouvillian build_fermion(const ModelFile& model);

}  // namespace qmix
