#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qmix/errors.hpp"
#include "qmix/linalg.hpp"
#include "qmix/model_file.hpp"
#include "qmix/models.hpp"

using namespace qmix;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> violations_of(std::string_view text) {
  try {
    parse_model(text);
  } catch (const ValidationError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, std::string_view needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

double flow_difference(const Liouvillian& a, const Liouvillian& b, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix rho = random_state(a.dim(), rng);
  return (evolve(a, rho, 0.7) - evolve(b, rho, 0.7)).norm();
}

}  // namespace

TEST_CASE("minimal depolarizing qubit") {
  const auto m = parse_model(R"({"kind": "spin", "lattice": {"extents": [1]},
    "terms": [{"sites": [0], "jumps": [{"pauli": [{"string": "X", "coeff": 0.5}]}]}]})");
  CHECK(m.kind == ModelKind::spin);
  CHECK(m.name == "model");
  CHECK(m.local_dim == 2);
  REQUIRE(m.terms.size() == 1);
  CHECK(m.terms[0].jumps.size() == 1);
  CHECK(!m.experiment.has_value());
  CHECK(build_liouvillian(m).dim() == 2);
}

TEST_CASE("every example model round-trips") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(QMIX_MODELS_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().filename().string());
    const std::string text = slurp(entry.path());
    const ModelFile m = parse_model(text);
    const std::string out = serialize_model(m);
    CHECK(nlohmann::json::parse(out) == nlohmann::json::parse(text));
    CHECK(serialize_model(parse_model(out)) == out);
    CHECK(m.name == entry.path().stem().string());
    ++count;
  }
  CHECK(count >= 8);
}

TEST_CASE("model files build the reference generators") {
  const auto dir = std::filesystem::path(QMIX_MODELS_DIR);
  const auto hop = build_liouvillian(load_model(dir / "hopping6.json"));
  CHECK(flow_difference(hop, models::hopping_chain(6, 1.0, 0.5, 0.2, 0.1), 1) < 1e-12);
  const auto ising = build_liouvillian(load_model(dir / "davies_ising6.json"));
  CHECK(flow_difference(ising, models::davies_ising_chain(6, 1.0, 0.3, 1.0, 1.0), 2) < 1e-12);
  const auto dq = build_liouvillian(load_model(dir / "davies_qubit.json"));
  CHECK(flow_difference(dq, models::davies_qubit(1.0, 1.0), 3) < 1e-12);
  const auto dep = build_liouvillian(load_model(dir / "depolarizing_qubit.json"));
  CHECK(flow_difference(dep, models::depolarizing(1, 1.0), 4) < 1e-12);

  const auto fm = load_model(dir / "fermion_gapped200.json");
  const auto ql = build_fermion(fm);
  const auto ref = uniform_chain(200, 1.0, 0.5, 0.3, 0.4, 0.1);
  CHECK((ql.drift() - ref.drift()).norm() == 0.0);
  CHECK((ql.noise() - ref.noise()).norm() == 0.0);
  CHECK_THROWS_AS(build_liouvillian(fm), ShapeMismatch);
  CHECK_THROWS_AS(build_fermion(load_model(dir / "hopping6.json")), ShapeMismatch);

  const auto pert = load_model(dir / "driven6.json");
  const LocalTerm q = build_term(pert, *pert.experiment->perturbation);
  CHECK(q.support.sites() == std::vector<int>{0});
  CHECK((q.jumps.at(0) - std::sqrt(2.0) * pauli::lowering()).norm() < 1e-15);
}

TEST_CASE("complex coefficients and explicit matrices") {
  const auto m = parse_model(R"({"kind": "spin", "lattice": {"extents": [2]},
    "terms": [{"sites": [0, 1], "hamiltonian": {"pauli": [{"string": "XY", "coeff": 0.25}],
               "matrix": [[1, 0, 0, 0], [0, 0, [0, -1], 0], [0, [0, 1], 0, 0], [0, 0, 0, 1]]}}]})");
  const Matrix h = operator_matrix(*m.terms[0].hamiltonian, 2, 2);
  CHECK(h(1, 2) == cplx(0.0, -1.0) + 0.25 * pauli::string("XY")(1, 2));
  CHECK((h - h.adjoint()).norm() < 1e-15);
  const auto again = parse_model(serialize_model(m));
  CHECK((operator_matrix(*again.terms[0].hamiltonian, 2, 2) - h).norm() == 0.0);
}

TEST_CASE("parse errors carry line and column") {
  const std::string text = "{\n  \"kind\": \"spin\",\n  \"lattice\": {\"extents\": [1],}\n}";
  try {
    parse_model(text);
    FAIL("no ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 1);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(e.name() == "ParseError");
  }
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ParseError);
}

TEST_CASE("malformed jump vector names the jump index") {
  const auto v = violations_of(R"({"kind": "fermion", "lattice": {"extents": [3]},
    "fermion": {"jumps": [{"lowering": [{"mode": 0, "value": 1.0}]},
                          {"lowering": [{"mode": 7, "value": 1.0}]},
                          {"raising": [{"mode": 1, "value": 0.0}]}]}})");
  CHECK(mentions(v, "fermion.jumps[1].lowering[0].mode"));
  CHECK(mentions(v, "fermion.jumps[2]: jump vector is zero"));
  CHECK(!mentions(v, "fermion.jumps[0]"));
}

TEST_CASE("validation lists every violation") {
  const auto v = violations_of(R"({"kind": "spin", "lattice": {"extents": [2]}, "colour": 1,
    "terms": [{"sites": [0, 2], "hamiltonian": {"pauli": [{"string": "X"}]}},
              {"sites": [0], "hamiltonian": {"pauli": [{"string": "XX"}]}},
              {"sites": [1], "hamiltonian": {"matrix": [[0, 1], [0, 0]]}},
              {"sites": [0, 0], "jumps": []}],
    "experiment": {"regions": {"A": [5]}, "distances": [0], "probes": ["Q"]}})");
  CHECK(mentions(v, "colour: unknown field"));
  CHECK(mentions(v, "terms[0].sites[1]: site 2 outside the lattice"));
  CHECK(mentions(v, "terms[1].hamiltonian.pauli[0].string: length 2"));
  CHECK(mentions(v, "terms[2].hamiltonian: not Hermitian"));
  CHECK(mentions(v, "terms[3].sites[1]: repeated site 0"));
  CHECK(mentions(v, "experiment.regions.A[0]"));
  CHECK(mentions(v, "experiment.distances[0]"));
  CHECK(mentions(v, "experiment.probes[0]"));
  CHECK(v.size() >= 8);

  CHECK(mentions(violations_of(R"({"kind": "qutrit", "lattice": {"extents": [1]}})"), "kind"));
  CHECK(mentions(violations_of(R"({"kind": "spin"})"), "lattice"));
  CHECK(mentions(violations_of(R"({"kind": "spin", "lattice": {"extents": [1]}, "terms": []})"), "terms"));
}

TEST_CASE("Davies and fermion schema rules") {
  const auto d = violations_of(R"({"kind": "davies", "lattice": {"extents": [1]},
    "terms": [{"sites": [0], "hamiltonian": {"pauli": [{"string": "Z"}]},
               "jumps": [{"pauli": [{"string": "X"}]}]}],
    "couplings": [{"sites": [0], "operator": {"matrix": [[0, 1], [0, 0]]}}],
    "parameters": {"eta0": -1}})");
  CHECK(mentions(d, "terms[0].jumps"));
  CHECK(mentions(d, "couplings[0].operator: coupling must be Hermitian"));
  CHECK(mentions(d, "parameters.beta: required"));
  CHECK(mentions(d, "parameters.eta0: must be positive"));

  const auto f = violations_of(R"({"kind": "fermion", "lattice": {"extents": [2, 2]},
    "fermion": {"uniform": {"loss": -1},
                "quadratic": [{"kind": "pairing", "i": 1, "j": 1, "value": 1},
                              {"kind": "potential", "i": 0, "value": [1, 1]},
                              {"kind": "spin-orbit", "i": 0, "j": 1, "value": 1}]},
    "terms": []})");
  CHECK(mentions(f, "fermion.uniform: uniform chains need a one-dimensional lattice"));
  CHECK(mentions(f, "fermion.uniform.loss"));
  CHECK(mentions(f, "fermion.quadratic[0]: pairing needs two distinct modes"));
  CHECK(mentions(f, "fermion.quadratic[1].value: potential must be real"));
  CHECK(mentions(f, "fermion.quadratic[2].kind"));
  CHECK(mentions(f, "terms: not used by fermion models"));
}
