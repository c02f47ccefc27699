#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmix/correlations.hpp"
#include "qmix/errors.hpp"
#include "qmix/fermion.hpp"
#include "qmix/harness.hpp"
#include "qmix/mixing.hpp"
#include "qmix/model_file.hpp"
#include "qmix/models.hpp"

namespace py = pybind11;
using namespace qmix;

namespace {

Region region_of(const Lattice& lattice, const std::vector<int>& sites) { return Region(lattice, sites); }

py::dict gap_dict(const GapResult& g) {
  py::dict d;
  d["gap"] = g.gap;
  d["chi2"] = g.chi2;
  d["reversible"] = g.reversible;
  d["chi2_mismatch"] = g.chi2_mismatch;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mixing, correlations and light cones of open quantum lattice systems";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      PyErr_SetString(input_error.ptr(), e.what());
    } catch (const NumericalError& e) {
      PyErr_SetString(numerical_error.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  py::class_<Liouvillian>(m, "Liouvillian")
      .def_property_readonly("dim", &Liouvillian::dim)
      .def_property_readonly("sites", [](const Liouvillian& l) { return l.lattice().size(); })
      .def_property_readonly("local_dim", &Liouvillian::local_dim)
      .def("hamiltonian", [](const Liouvillian& l) { return Matrix(l.hamiltonian()); })
      .def("superop", [](const Liouvillian& l) { return Matrix(l.superop()); },
           "Dense superoperator on column-stacked density matrices.");

  py::class_<QuadraticLiouvillian>(m, "QuadraticLiouvillian")
      .def_property_readonly("modes", &QuadraticLiouvillian::modes)
      .def_property_readonly("drift", [](const QuadraticLiouvillian& q) { return RealMatrix(q.drift()); })
      .def_property_readonly("noise", [](const QuadraticLiouvillian& q) { return RealMatrix(q.noise()); });

  auto models_m = m.def_submodule("models", "Reference qubit models");
  models_m.def("depolarizing", &models::depolarizing, py::arg("sites"), py::arg("gamma"));
  models_m.def("dephasing", &models::dephasing, py::arg("sites"), py::arg("gamma"));
  models_m.def("amplitude_damping", &models::amplitude_damping, py::arg("sites"), py::arg("gamma"));
  models_m.def("davies_qubit", &models::davies_qubit, py::arg("beta"), py::arg("eta0") = 1.0);
  models_m.def("davies_ising_chain", &models::davies_ising_chain, py::arg("sites"), py::arg("field"),
               py::arg("zz"), py::arg("beta"), py::arg("eta0") = 1.0);
  models_m.def("hopping_chain", &models::hopping_chain, py::arg("sites"), py::arg("hop"), py::arg("field"),
               py::arg("loss"), py::arg("gain"));

  m.def("load_liouvillian", [](const std::string& path) { return build_liouvillian(load_model(path)); },
        py::arg("path"));
  m.def("load_fermion", [](const std::string& path) { return build_fermion(load_model(path)); },
        py::arg("path"));
  m.def("canonical_model", [](const std::string& text) { return serialize_model(parse_model(text)); },
        py::arg("text"), "Validated model text in canonical form.");

  m.def("stationary_state", [](const Liouvillian& l) { return stationary_state(l).matrix(); });
  m.def("evolve",
        [](const Liouvillian& l, const Matrix& op, double t, bool heisenberg) {
          return evolve(l, op, t, heisenberg ? Picture::heisenberg : Picture::schroedinger);
        },
        py::arg("l"), py::arg("operand"), py::arg("t"), py::arg("heisenberg") = false);
  m.def("spectral_gap", [](const Liouvillian& l) { return gap_dict(spectral_gap(l)); });
  m.def("log_sobolev_estimate",
        [](const Liouvillian& l, double s, std::uint64_t seed, int restarts) {
          LogSobolevOptions o;
          o.seed = seed;
          o.restarts = restarts;
          const auto r = log_sobolev_estimate(l, WeightedContext(stationary_state(l), s), o);
          py::dict d;
          d["estimate"] = r.estimate;
          d["variational"] = r.variational;
          d["linearized"] = r.linearized;
          return d;
        },
        py::arg("l"), py::arg("s") = 0.5, py::arg("seed") = 0, py::arg("restarts") = 20,
        "Upper estimate of the log-Sobolev constant.");

  m.def("trace_correlation", py::overload_cast<const Matrix&, long>(&trace_correlation), py::arg("rho_ab"),
        py::arg("d_a"));
  m.def("mutual_information", py::overload_cast<const Matrix&, long>(&mutual_information), py::arg("rho_ab"),
        py::arg("d_a"));
  m.def("covariance_correlation",
        [](const Matrix& rho, long d_a, std::uint64_t seed, int restarts) {
          CovarianceOptions o;
          o.seed = seed;
          o.restarts = restarts;
          return covariance_correlation(rho, d_a, o).value;
        },
        py::arg("rho_ab"), py::arg("d_a"), py::arg("seed") = 0, py::arg("restarts") = 10);

  m.def("lr_deviation",
        [](const Liouvillian& l, const Matrix& f, const std::vector<int>& y, const std::vector<int>& b,
           double t) { return lr_deviation(l, f, region_of(l.lattice(), y), region_of(l.lattice(), b), t); },
        py::arg("l"), py::arg("f"), py::arg("y"), py::arg("b"), py::arg("t"));
  m.def("estimate_velocity",
        [](const Liouvillian& l, const std::vector<Matrix>& probes, const std::vector<int>& y,
           const std::vector<int>& distances, double epsilon) {
          LightConeOptions o;
          o.epsilon = epsilon;
          const auto est = estimate_velocity(l, probes, region_of(l.lattice(), y), distances, o);
          py::dict d;
          d["velocity"] = est.velocity;
          d["r_squared"] = est.fit_quality;
          d["contour"] = est.contour;
          d["accepted"] = est.accepted;
          return d;
        },
        py::arg("l"), py::arg("probes"), py::arg("y"), py::arg("distances"), py::arg("epsilon") = 1e-6);

  m.def("uniform_chain", &uniform_chain, py::arg("modes"), py::arg("hop"), py::arg("pairing"),
        py::arg("potential"), py::arg("loss"), py::arg("gain"));
  m.def("stationary_covariance", [](const QuadraticLiouvillian& q) { return stationary_covariance(q).gamma(); });
  m.def("fermion_gap", &fermion_gap);
  m.def("fermion_mutual_information",
        [](const RealMatrix& gamma, const std::vector<int>& a, const std::vector<int>& b) {
          const CovarianceMatrix g(gamma);
          const Lattice chain = Lattice::chain(g.modes());
          return fermion_mutual_information(g, Region(chain, a), Region(chain, b)).bits;
        },
        py::arg("gamma"), py::arg("a"), py::arg("b"), "Gaussian mutual information in bits.");
  m.def("gaussian_min_eigenvalue",
        [](const RealMatrix& gamma) { return gaussian_min_eigenvalue(CovarianceMatrix(gamma)).value; });
}
