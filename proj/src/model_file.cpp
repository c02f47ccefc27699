#include "qmix/model_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qmix/errors.hpp"

namespace qmix {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Collects violations as "path: message" so that one pass reports them all.
class Checker {
 public:
  void fail(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }
  bool ok() const { return errors_.empty(); }
  std::size_t count() const { return errors_.size(); }
  [[noreturn]] void raise() { throw ValidationError(errors_); }

  void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : j.items()) {
      (void)v;
      if (std::none_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; }))
        fail(join(path, k), "unknown field");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string index(const std::string& path, std::size_t k) {
    return path + "[" + std::to_string(k) + "]";
  }

 private:
  std::vector<std::string> errors_;
};

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::optional<double> read_number(const json& j, const std::string& path, Checker& c) {
  if (!j.is_number()) {
    c.fail(path, "expected a number");
    return std::nullopt;
  }
  const double x = j.get<double>();
  if (!std::isfinite(x)) {
    c.fail(path, "not finite");
    return std::nullopt;
  }
  return x;
}

std::optional<int> read_int(const json& j, const std::string& path, Checker& c) {
  if (!j.is_number_integer()) {
    c.fail(path, "expected an integer");
    return std::nullopt;
  }
  return j.get<int>();
}

// A number or a [re, im] pair.
std::optional<cplx> read_complex(const json& j, const std::string& path, Checker& c) {
  if (j.is_number()) {
    const auto x = read_number(j, path, c);
    return x ? std::optional<cplx>(*x) : std::nullopt;
  }
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    const double re = j[0].get<double>(), im = j[1].get<double>();
    if (std::isfinite(re) && std::isfinite(im)) return cplx(re, im);
    c.fail(path, "not finite");
    return std::nullopt;
  }
  c.fail(path, "expected a number or [re, im]");
  return std::nullopt;
}

std::vector<int> read_sites(const json& j, const std::string& path, int n_sites, Checker& c,
                            bool allow_empty = false) {
  std::vector<int> out;
  if (!j.is_array()) {
    c.fail(path, "expected a list of sites");
    return out;
  }
  if (j.empty() && !allow_empty) c.fail(path, "empty site list");
  std::set<int> seen;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto s = read_int(j[k], Checker::index(path, k), c);
    if (!s) continue;
    if (*s < 0 || *s >= n_sites)
      c.fail(Checker::index(path, k), "site " + std::to_string(*s) + " outside the lattice");
    else if (!seen.insert(*s).second)
      c.fail(Checker::index(path, k), "repeated site " + std::to_string(*s));
    out.push_back(*s);
  }
  return out;
}

long ipow(long base, std::size_t e) {
  long out = 1;
  for (std::size_t k = 0; k < e; ++k) out *= base;
  return out;
}

std::optional<OperatorSpec> read_operator(const json& j, const std::string& path, std::size_t n_sites,
                                          int local_dim, Checker& c) {
  if (!j.is_object()) {
    c.fail(path, "expected an operator object");
    return std::nullopt;
  }
  c.only_keys(j, path, {"pauli", "matrix"});
  if (!j.contains("pauli") && !j.contains("matrix")) {
    c.fail(path, "operator needs \"pauli\" or \"matrix\"");
    return std::nullopt;
  }
  const std::size_t before = c.count();
  OperatorSpec op;
  if (j.contains("pauli")) {
    const std::string p = Checker::join(path, "pauli");
    if (!j["pauli"].is_array()) {
      c.fail(p, "expected a list of {string, coeff}");
    } else {
      if (local_dim != 2) c.fail(p, "Pauli strings need local_dim 2");
      for (std::size_t k = 0; k < j["pauli"].size(); ++k) {
        const json& e = j["pauli"][k];
        const std::string pk = Checker::index(p, k);
        if (!e.is_object() || !e.contains("string") || !e["string"].is_string()) {
          c.fail(pk, "expected {\"string\": ..., \"coeff\": ...}");
          continue;
        }
        c.only_keys(e, pk, {"string", "coeff"});
        const std::string s = e["string"].get<std::string>();
        if (s.size() != n_sites)
          c.fail(Checker::join(pk, "string"), "length " + std::to_string(s.size()) + " does not match " +
                                                  std::to_string(n_sites) + " sites");
        if (s.find_first_not_of("IXYZ") != std::string::npos)
          c.fail(Checker::join(pk, "string"), "letters must be I, X, Y or Z");
        cplx coeff = 1.0;
        if (e.contains("coeff")) {
          const auto v = read_complex(e["coeff"], Checker::join(pk, "coeff"), c);
          if (v) coeff = *v;
        }
        op.paulis.emplace_back(s, coeff);
      }
    }
  }
  if (j.contains("matrix")) {
    const std::string p = Checker::join(path, "matrix");
    const json& m = j["matrix"];
    const long dim = ipow(local_dim, n_sites);
    if (!m.is_array() || static_cast<long>(m.size()) != dim) {
      c.fail(p, "expected " + std::to_string(dim) + " rows");
    } else {
      Matrix out(dim, dim);
      bool good = true;
      for (long r = 0; r < dim; ++r) {
        const std::string pr = Checker::index(p, r);
        if (!m[r].is_array() || static_cast<long>(m[r].size()) != dim) {
          c.fail(pr, "expected " + std::to_string(dim) + " entries");
          good = false;
          continue;
        }
        for (long col = 0; col < dim; ++col) {
          const auto v = read_complex(m[r][col], Checker::index(pr, col), c);
          if (v)
            out(r, col) = *v;
          else
            good = false;
        }
      }
      if (good) op.matrix = std::move(out);
    }
  }
  if (c.count() != before) return std::nullopt;
  return op;
}

bool hermitian(const Matrix& m) {
  return (m - m.adjoint()).norm() <= 1e-12 * std::max(1.0, m.norm());
}

std::optional<TermSpec> read_term(const json& j, const std::string& path, int n_sites, int local_dim,
                                  bool jumps_allowed, Checker& c) {
  if (!j.is_object()) {
    c.fail(path, "expected a term object");
    return std::nullopt;
  }
  c.only_keys(j, path, {"sites", "hamiltonian", "jumps"});
  if (!j.contains("sites")) {
    c.fail(path, "missing \"sites\"");
    return std::nullopt;
  }
  const std::size_t before = c.count();
  TermSpec t;
  t.sites = read_sites(j["sites"], Checker::join(path, "sites"), n_sites, c);
  if (c.count() != before) return std::nullopt;
  if (!j.contains("hamiltonian") && !j.contains("jumps"))
    c.fail(path, "term needs a \"hamiltonian\" or \"jumps\"");
  if (j.contains("hamiltonian")) {
    const std::string p = Checker::join(path, "hamiltonian");
    t.hamiltonian = read_operator(j["hamiltonian"], p, t.sites.size(), local_dim, c);
    if (t.hamiltonian && !hermitian(operator_matrix(*t.hamiltonian, t.sites.size(), local_dim)))
      c.fail(p, "not Hermitian");
  }
  if (j.contains("jumps")) {
    const std::string p = Checker::join(path, "jumps");
    if (!jumps_allowed) {
      c.fail(p, "jumps of this model kind are generated, not listed");
    } else if (!j["jumps"].is_array()) {
      c.fail(p, "expected a list of operators");
    } else {
      for (std::size_t k = 0; k < j["jumps"].size(); ++k) {
        auto op = read_operator(j["jumps"][k], Checker::index(p, k), t.sites.size(), local_dim, c);
        if (op) t.jumps.push_back(std::move(*op));
      }
    }
  }
  if (c.count() != before) return std::nullopt;
  return t;
}

void read_fermion(const json& j, ModelFile& m, Checker& c) {
  const std::string path = "fermion";
  if (!j.is_object()) {
    c.fail(path, "expected an object");
    return;
  }
  c.only_keys(j, path, {"uniform", "quadratic", "jumps"});
  const int modes = m.lattice().size();
  if (!j.contains("uniform") && !j.contains("quadratic") && !j.contains("jumps"))
    c.fail(path, "needs \"uniform\", \"quadratic\" or \"jumps\"");
  if (j.contains("uniform")) {
    const std::string p = "fermion.uniform";
    const json& u = j["uniform"];
    if (!u.is_object()) {
      c.fail(p, "expected an object");
    } else {
      c.only_keys(u, p, {"hop", "pairing", "potential", "loss", "gain"});
      if (m.extents.size() != 1) c.fail(p, "uniform chains need a one-dimensional lattice");
      UniformChainSpec s;
      auto field = [&](const char* key, double& out) {
        if (u.contains(key))
          if (auto v = read_number(u[key], Checker::join(p, key), c)) out = *v;
      };
      field("hop", s.hop);
      field("pairing", s.pairing);
      field("potential", s.potential);
      field("loss", s.loss);
      field("gain", s.gain);
      if (s.loss < 0.0) c.fail(p + ".loss", "rates must be nonnegative");
      if (s.gain < 0.0) c.fail(p + ".gain", "rates must be nonnegative");
      m.uniform = s;
    }
  }
  if (j.contains("quadratic")) {
    const std::string p = "fermion.quadratic";
    if (!j["quadratic"].is_array()) c.fail(p, "expected a list");
    for (std::size_t k = 0; j["quadratic"].is_array() && k < j["quadratic"].size(); ++k) {
      const json& e = j["quadratic"][k];
      const std::string pk = Checker::index(p, k);
      if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string() || !e.contains("i") ||
          !e.contains("value")) {
        c.fail(pk, "expected {\"kind\", \"i\", \"j\", \"value\"}");
        continue;
      }
      c.only_keys(e, pk, {"kind", "i", "j", "value"});
      QuadraticTerm t;
      const std::string kind = e["kind"].get<std::string>();
      if (kind == "hopping")
        t.kind = QuadraticTerm::Kind::hopping;
      else if (kind == "pairing")
        t.kind = QuadraticTerm::Kind::pairing;
      else if (kind == "potential")
        t.kind = QuadraticTerm::Kind::potential;
      else
        c.fail(pk + ".kind", "expected hopping, pairing or potential");
      const auto i = read_int(e["i"], pk + ".i", c);
      const auto jj = e.contains("j") ? read_int(e["j"], pk + ".j", c) : i;
      const auto v = read_complex(e["value"], pk + ".value", c);
      if (!i || !jj || !v) continue;
      if (*i < 0 || *i >= modes) c.fail(pk + ".i", "mode outside the lattice");
      if (*jj < 0 || *jj >= modes) c.fail(pk + ".j", "mode outside the lattice");
      if (t.kind == QuadraticTerm::Kind::pairing && *i == *jj)
        c.fail(pk, "pairing needs two distinct modes");
      if (t.kind == QuadraticTerm::Kind::potential && *i != *jj)
        c.fail(pk, "potential acts on a single mode");
      if (t.kind == QuadraticTerm::Kind::potential && v->imag() != 0.0)
        c.fail(pk + ".value", "potential must be real");
      t.i = *i;
      t.j = *jj;
      t.value = *v;
      m.quadratic.push_back(t);
    }
  }
  if (j.contains("jumps")) {
    const std::string p = "fermion.jumps";
    if (!j["jumps"].is_array()) c.fail(p, "expected a list");
    for (std::size_t k = 0; j["jumps"].is_array() && k < j["jumps"].size(); ++k) {
      const json& e = j["jumps"][k];
      const std::string pk = Checker::index(p, k);
      const std::size_t before = c.count();
      if (!e.is_object()) {
        c.fail(pk, "expected {\"lowering\": [...], \"raising\": [...]}");
        continue;
      }
      c.only_keys(e, pk, {"lowering", "raising"});
      JumpSpec spec;
      double weight = 0.0;
      for (const char* side : {"lowering", "raising"}) {
        if (!e.contains(side)) continue;
        const std::string ps = Checker::join(pk, side);
        if (!e[side].is_array()) {
          c.fail(ps, "expected a list of {mode, value}");
          continue;
        }
        for (std::size_t q = 0; q < e[side].size(); ++q) {
          const json& x = e[side][q];
          const std::string pq = Checker::index(ps, q);
          if (!x.is_object() || !x.contains("mode") || !x.contains("value")) {
            c.fail(pq, "expected {\"mode\": ..., \"value\": ...}");
            continue;
          }
          c.only_keys(x, pq, {"mode", "value"});
          const auto mode = read_int(x["mode"], pq + ".mode", c);
          const auto v = read_complex(x["value"], pq + ".value", c);
          if (!mode || !v) continue;
          if (*mode < 0 || *mode >= modes) c.fail(pq + ".mode", "mode outside the lattice");
          weight += std::norm(*v);
          (std::string(side) == "lowering" ? spec.lowering : spec.raising).emplace_back(*mode, *v);
        }
      }
      if (c.count() == before && weight == 0.0) c.fail(pk, "jump vector is zero");
      if (c.count() == before) m.fermion_jumps.push_back(std::move(spec));
    }
  }
}

void read_experiment(const json& j, ModelFile& m, Checker& c) {
  const std::string path = "experiment";
  if (!j.is_object()) {
    c.fail(path, "expected an object");
    return;
  }
  c.only_keys(j, path, {"regions", "distances", "blocks", "probes", "perturbation", "seed", "tolerances"});
  const int n = m.lattice().size();
  ExperimentSpec e;
  if (j.contains("regions")) {
    if (!j["regions"].is_object())
      c.fail("experiment.regions", "expected an object of site lists");
    else
      for (const auto& [name, sites] : j["regions"].items())
        e.regions[name] = read_sites(sites, "experiment.regions." + name, n, c);
  }
  auto ints = [&](const char* key, int lo, int hi, std::vector<int>& out) {
    if (!j.contains(key)) return;
    const std::string p = Checker::join(path, key);
    if (!j[key].is_array()) {
      c.fail(p, "expected a list of integers");
      return;
    }
    for (std::size_t k = 0; k < j[key].size(); ++k) {
      const auto v = read_int(j[key][k], Checker::index(p, k), c);
      if (!v) continue;
      if (*v < lo || *v > hi)
        c.fail(Checker::index(p, k), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      out.push_back(*v);
    }
  };
  ints("distances", 1, std::max(1, m.lattice().diameter()), e.distances);
  ints("blocks", 1, n, e.blocks);
  if (j.contains("probes")) {
    const std::string p = "experiment.probes";
    if (!j["probes"].is_array()) c.fail(p, "expected a list of Pauli labels");
    for (std::size_t k = 0; j["probes"].is_array() && k < j["probes"].size(); ++k) {
      const json& x = j["probes"][k];
      if (!x.is_string() || x.get<std::string>().empty() ||
          x.get<std::string>().find_first_not_of("IXYZ") != std::string::npos) {
        c.fail(Checker::index(p, k), "expected a Pauli label such as \"Z\"");
        continue;
      }
      e.probes.push_back(x.get<std::string>());
    }
  }
  if (j.contains("perturbation")) {
    if (m.kind == ModelKind::fermion)
      c.fail("experiment.perturbation", "perturbations apply to spin and Davies models");
    else
      e.perturbation = read_term(j["perturbation"], "experiment.perturbation", n, m.local_dim, true, c);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned())
      c.fail("experiment.seed", "expected a nonnegative integer");
    else
      e.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object())
      c.fail("experiment.tolerances", "expected an object of numbers");
    else
      for (const auto& [name, v] : j["tolerances"].items())
        if (auto x = read_number(v, "experiment.tolerances." + name, c)) e.tolerances[name] = *x;
  }
  m.experiment = std::move(e);
}

ModelFile read_model(const json& j) {
  Checker c;
  ModelFile m;
  if (!j.is_object()) {
    c.fail("(root)", "expected an object");
    c.raise();
  }
  c.only_keys(j, "", {"name", "kind", "lattice", "terms", "couplings", "parameters", "fermion", "experiment"});
  if (j.contains("name")) {
    if (j["name"].is_string() && !j["name"].get<std::string>().empty())
      m.name = j["name"].get<std::string>();
    else
      c.fail("name", "expected a nonempty string");
  }
  bool kind_ok = false;
  if (!j.contains("kind") || !j["kind"].is_string()) {
    c.fail("kind", "required: \"spin\", \"davies\" or \"fermion\"");
  } else {
    const std::string k = j["kind"].get<std::string>();
    kind_ok = true;
    if (k == "spin")
      m.kind = ModelKind::spin;
    else if (k == "davies")
      m.kind = ModelKind::davies;
    else if (k == "fermion")
      m.kind = ModelKind::fermion;
    else {
      c.fail("kind", "unknown kind \"" + k + "\"");
      kind_ok = false;
    }
  }
  bool lattice_ok = false;
  if (!j.contains("lattice") || !j["lattice"].is_object()) {
    c.fail("lattice", "required object with \"extents\"");
  } else {
    const json& l = j["lattice"];
    c.only_keys(l, "lattice", {"extents", "local_dim"});
    const std::size_t before = c.count();
    if (!l.contains("extents") || !l["extents"].is_array() || l["extents"].empty() ||
        l["extents"].size() > 3) {
      c.fail("lattice.extents", "expected one to three positive integers");
    } else {
      for (std::size_t k = 0; k < l["extents"].size(); ++k) {
        const auto v = read_int(l["extents"][k], Checker::index("lattice.extents", k), c);
        if (v && *v < 1) c.fail(Checker::index("lattice.extents", k), "must be positive");
        if (v) m.extents.push_back(*v);
      }
    }
    if (l.contains("local_dim")) {
      const auto v = read_int(l["local_dim"], "lattice.local_dim", c);
      if (v && *v < 2) c.fail("lattice.local_dim", "must be at least 2");
      if (v) m.local_dim = *v;
    }
    lattice_ok = c.count() == before;
  }
  if (!kind_ok || !lattice_ok) c.raise();
  const int n = m.lattice().size();

  if (m.kind == ModelKind::fermion) {
    if (m.local_dim != 2) c.fail("lattice.local_dim", "fermionic modes have local_dim 2");
    for (const char* key : {"terms", "couplings", "parameters"})
      if (j.contains(key)) c.fail(key, "not used by fermion models");
    if (!j.contains("fermion"))
      c.fail("fermion", "required for fermion models");
    else
      read_fermion(j["fermion"], m, c);
  } else {
    if (j.contains("fermion")) c.fail("fermion", "only used by fermion models");
    const bool davies = m.kind == ModelKind::davies;
    if (!j.contains("terms") || !j["terms"].is_array() || (!davies && j["terms"].empty())) {
      if (!davies || j.contains("terms")) c.fail("terms", "expected a nonempty list of terms");
    } else {
      for (std::size_t k = 0; k < j["terms"].size(); ++k) {
        const std::string p = Checker::index("terms", k);
        if (davies && j["terms"][k].is_object() && !j["terms"][k].contains("hamiltonian"))
          c.fail(p, "Davies terms need a \"hamiltonian\"");
        if (auto t = read_term(j["terms"][k], p, n, m.local_dim, !davies, c)) m.terms.push_back(std::move(*t));
      }
    }
    if (!davies) {
      if (j.contains("couplings")) c.fail("couplings", "only used by Davies models");
      if (j.contains("parameters")) c.fail("parameters", "only used by Davies models");
    } else {
      if (!j.contains("couplings") || !j["couplings"].is_array() || j["couplings"].empty()) {
        c.fail("couplings", "expected a nonempty list");
      } else {
        for (std::size_t k = 0; k < j["couplings"].size(); ++k) {
          const json& e = j["couplings"][k];
          const std::string p = Checker::index("couplings", k);
          if (!e.is_object() || !e.contains("sites") || !e.contains("operator")) {
            c.fail(p, "expected {\"sites\": ..., \"operator\": ...}");
            continue;
          }
          c.only_keys(e, p, {"sites", "operator"});
          const std::size_t before = c.count();
          CouplingSpec s;
          s.sites = read_sites(e["sites"], p + ".sites", n, c);
          if (c.count() != before) continue;
          auto op = read_operator(e["operator"], p + ".operator", s.sites.size(), m.local_dim, c);
          if (!op) continue;
          if (!hermitian(operator_matrix(*op, s.sites.size(), m.local_dim)))
            c.fail(p + ".operator", "coupling must be Hermitian");
          s.op = std::move(*op);
          m.couplings.push_back(std::move(s));
        }
      }
      m.parameters["eta0"] = 1.0;
      if (!j.contains("parameters") || !j["parameters"].is_object()) {
        c.fail("parameters", "required object with \"beta\"");
      } else {
        c.only_keys(j["parameters"], "parameters", {"beta", "eta0"});
        if (!j["parameters"].contains("beta")) c.fail("parameters.beta", "required");
        for (const auto& [k, v] : j["parameters"].items())
          if (auto x = read_number(v, "parameters." + k, c)) m.parameters[k] = *x;
        if (m.parameters.count("beta") && m.parameters["beta"] < 0.0)
          c.fail("parameters.beta", "must be nonnegative");
        if (m.parameters["eta0"] <= 0.0) c.fail("parameters.eta0", "must be positive");
      }
    }
  }
  if (j.contains("experiment")) read_experiment(j["experiment"], m, c);
  if (!c.ok()) c.raise();
  return m;
}

ojson write_complex(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return ojson::array({z.real(), z.imag()});
}

ojson write_operator(const OperatorSpec& op) {
  ojson j;
  if (!op.paulis.empty()) {
    ojson list = ojson::array();
    for (const auto& [s, coeff] : op.paulis) {
      ojson e;
      e["string"] = s;
      e["coeff"] = write_complex(coeff);
      list.push_back(e);
    }
    j["pauli"] = list;
  }
  if (op.matrix) {
    ojson rows = ojson::array();
    for (long r = 0; r < op.matrix->rows(); ++r) {
      ojson row = ojson::array();
      for (long c = 0; c < op.matrix->cols(); ++c) row.push_back(write_complex((*op.matrix)(r, c)));
      rows.push_back(row);
    }
    j["matrix"] = rows;
  }
  return j;
}

ojson write_term(const TermSpec& t) {
  ojson j;
  j["sites"] = t.sites;
  if (t.hamiltonian) j["hamiltonian"] = write_operator(*t.hamiltonian);
  if (!t.jumps.empty()) {
    ojson list = ojson::array();
    for (const auto& op : t.jumps) list.push_back(write_operator(op));
    j["jumps"] = list;
  }
  return j;
}

const char* quadratic_kind(QuadraticTerm::Kind k) {
  switch (k) {
    case QuadraticTerm::Kind::hopping: return "hopping";
    case QuadraticTerm::Kind::pairing: return "pairing";
    case QuadraticTerm::Kind::potential: return "potential";
  }
  return "hopping";
}

}  // namespace

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::spin: return "spin";
    case ModelKind::davies: return "davies";
    case ModelKind::fermion: return "fermion";
  }
  return "spin";
}

ModelFile parse_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    // drop the library's "[json.exception.parse_error.101] parse error at ..." prefix
    if (const auto p = what.find(": "); p != std::string::npos) what = what.substr(p + 2);
    throw ParseError(what, line, col);
  }
  return read_model(j);
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string serialize_model(const ModelFile& m) {
  ojson j;
  j["name"] = m.name;
  j["kind"] = model_kind_name(m.kind);
  j["lattice"]["extents"] = m.extents;
  j["lattice"]["local_dim"] = m.local_dim;
  if (m.kind != ModelKind::fermion) {
    ojson terms = ojson::array();
    for (const auto& t : m.terms) terms.push_back(write_term(t));
    j["terms"] = terms;
  }
  if (m.kind == ModelKind::davies) {
    ojson cs = ojson::array();
    for (const auto& c : m.couplings) {
      ojson e;
      e["sites"] = c.sites;
      e["operator"] = write_operator(c.op);
      cs.push_back(e);
    }
    j["couplings"] = cs;
    ojson params;
    for (const auto& [k, v] : m.parameters) params[k] = v;
    j["parameters"] = params;
  }
  if (m.kind == ModelKind::fermion) {
    ojson f;
    if (m.uniform) {
      f["uniform"]["hop"] = m.uniform->hop;
      f["uniform"]["pairing"] = m.uniform->pairing;
      f["uniform"]["potential"] = m.uniform->potential;
      f["uniform"]["loss"] = m.uniform->loss;
      f["uniform"]["gain"] = m.uniform->gain;
    }
    if (!m.quadratic.empty()) {
      ojson list = ojson::array();
      for (const auto& t : m.quadratic) {
        ojson e;
        e["kind"] = quadratic_kind(t.kind);
        e["i"] = t.i;
        e["j"] = t.j;
        e["value"] = write_complex(t.value);
        list.push_back(e);
      }
      f["quadratic"] = list;
    }
    if (!m.fermion_jumps.empty()) {
      ojson list = ojson::array();
      for (const auto& jump : m.fermion_jumps) {
        ojson e;
        auto side = [](const std::vector<std::pair<int, cplx>>& v) {
          ojson out = ojson::array();
          for (const auto& [mode, value] : v) {
            ojson x;
            x["mode"] = mode;
            x["value"] = write_complex(value);
            out.push_back(x);
          }
          return out;
        };
        if (!jump.lowering.empty()) e["lowering"] = side(jump.lowering);
        if (!jump.raising.empty()) e["raising"] = side(jump.raising);
        list.push_back(e);
      }
      f["jumps"] = list;
    }
    j["fermion"] = f;
  }
  if (m.experiment) {
    const ExperimentSpec& e = *m.experiment;
    ojson x;
    if (!e.regions.empty())
      for (const auto& [name, sites] : e.regions) x["regions"][name] = sites;
    if (!e.distances.empty()) x["distances"] = e.distances;
    if (!e.blocks.empty()) x["blocks"] = e.blocks;
    if (!e.probes.empty()) x["probes"] = e.probes;
    if (e.perturbation) x["perturbation"] = write_term(*e.perturbation);
    x["seed"] = e.seed;
    if (!e.tolerances.empty())
      for (const auto& [name, v] : e.tolerances) x["tolerances"][name] = v;
    j["experiment"] = x;
  }
  return j.dump(2) + "\n";
}

Matrix operator_matrix(const OperatorSpec& op, int sites, int local_dim) {
  const long dim = ipow(local_dim, sites);
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& [s, coeff] : op.paulis) out += coeff * pauli::string(s);
  if (op.matrix) out += *op.matrix;
  return out;
}

LocalTerm build_term(const ModelFile& model, const TermSpec& term) {
  const Lattice lat = model.lattice();
  const int k = static_cast<int>(term.sites.size());
  LocalTerm out{Region(lat, term.sites), std::nullopt, {}};
  if (term.hamiltonian) out.hamiltonian = operator_matrix(*term.hamiltonian, k, model.local_dim);
  for (const auto& j : term.jumps) out.jumps.push_back(operator_matrix(j, k, model.local_dim));
  return out;
}

Liouvillian build_liouvillian(const ModelFile& model) {
  if (model.kind == ModelKind::fermion)
    throw ShapeMismatch("fermion models have a quadratic generator; use build_fermion");
  const Lattice lat = model.lattice();
  std::vector<LocalTerm> terms;
  for (const auto& t : model.terms) terms.push_back(build_term(model, t));
  if (model.kind == ModelKind::spin) return Liouvillian(lat, std::move(terms), model.local_dim);
  std::vector<std::pair<Matrix, Region>> couplings;
  for (const auto& c : model.couplings)
    couplings.emplace_back(operator_matrix(c.op, static_cast<int>(c.sites.size()), model.local_dim),
                           Region(lat, c.sites));
  return davies_generator(lat, terms, couplings, model.parameters.at("beta"),
                          model.parameters.at("eta0"), model.local_dim);
}

QuadraticLiouvillian build_fermion(const ModelFile& model) {
  if (model.kind != ModelKind::fermion) throw ShapeMismatch("not a fermion model");
  const Lattice lat = model.lattice();
  std::vector<QuadraticTerm> terms;
  std::vector<JumpSpec> jumps;
  if (model.uniform) {
    const auto& u = *model.uniform;
    auto spec = uniform_chain_spec(lat.size(), u.hop, u.pairing, u.potential, u.loss, u.gain);
    terms = std::move(spec.terms);
    jumps = std::move(spec.jumps);
  }
  terms.insert(terms.end(), model.quadratic.begin(), model.quadratic.end());
  jumps.insert(jumps.end(), model.fermion_jumps.begin(), model.fermion_jumps.end());
  return build_quadratic(lat, terms, jumps);
}

}  // namespace qmix
