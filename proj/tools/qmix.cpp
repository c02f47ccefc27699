// Command line front-end: reads a JSON model, runs one computation or
// experiment and writes JSON/CSV artifacts.
//
// Exit codes: 0 success, 2 model or usage error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmix/correlations.hpp"
#include "qmix/linalg.hpp"
#include "qmix/errors.hpp"
#include "qmix/fermion.hpp"
#include "qmix/harness.hpp"
#include "qmix/mixing.hpp"
#include "qmix/model_file.hpp"

using namespace qmix;
using ojson = nlohmann::ordered_json;

namespace {

// Tunable numbers accepted by --tol, with their defaults.
const std::map<std::string, double> kTolerances = {
    {"epsilon", 1e-6},       {"t_min", 1e-3},     {"t_max", 20.0},         {"grid_points", 40},
    {"bisection_tol", 1e-6}, {"min_r_squared", 0.9}, {"slack", 0.1},        {"restarts", 10},
    {"covariance_tol", 1e-10}, {"ls_restarts", 20}, {"ls_iterations", 4000}, {"entropy_floor", 1e-6},
    {"s", 0.5},              {"reversibility_tol", 1e-10},
};
// Measured inputs that may be supplied instead of computed.
const std::vector<std::string> kOverrides = {"velocity", "gap", "ls_constant"};

struct Flags {
  std::string model_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  std::string out;
  std::vector<std::string> tol;
  std::string format = "json";
  std::string measure = "C";
};

struct Context {
  ModelFile model;
  std::uint64_t seed = 0;
  int threads = 0;
  std::map<std::string, double> tol;
  std::map<std::string, double> overrides;

  double t(const std::string& name) const { return tol.at(name); }
  std::optional<double> given(const std::string& name) const {
    const auto it = overrides.find(name);
    return it == overrides.end() ? std::nullopt : std::optional<double>(it->second);
  }
  const ExperimentSpec& experiment() const {
    static const ExperimentSpec empty;
    return model.experiment ? *model.experiment : empty;
  }
  Region region(const std::string& name) const {
    const auto& r = experiment().regions;
    const auto it = r.find(name);
    if (it == r.end()) throw ShapeMismatch("the model's experiment block has no region \"" + name + "\"");
    return Region(model.lattice(), it->second);
  }
  std::vector<int> distances() const {
    if (experiment().distances.empty()) throw ShapeMismatch("the model's experiment block lists no distances");
    return experiment().distances;
  }
};

// Summary plus an optional row table; experiments carry a full report instead.
struct Output {
  std::string kind;
  ojson summary;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::optional<ExperimentReport> report;
};

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ojson json_number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

ojson matrix_json(const Matrix& m) {
  ojson re = ojson::array(), im = ojson::array();
  for (long r = 0; r < m.rows(); ++r) {
    ojson rr = ojson::array(), ii = ojson::array();
    for (long c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return ojson{{"real", re}, {"imag", im}};
}

void require_kind(const Context& c, bool fermion) {
  if ((c.model.kind == ModelKind::fermion) != fermion)
    throw ShapeMismatch(std::string("this subcommand needs a ") + (fermion ? "fermion" : "spin or Davies") +
                        " model, got kind " + model_kind_name(c.model.kind));
}

ojson header(const Context& c, const std::string& kind) {
  ojson j;
  j["kind"] = kind;
  j["model_id"] = c.model.name;
  j["seed"] = c.seed;
  return j;
}

LightConeOptions lightcone_options(const Context& c) {
  LightConeOptions o;
  o.epsilon = c.t("epsilon");
  o.t_min = c.t("t_min");
  o.t_max = c.t("t_max");
  o.grid_points = static_cast<int>(c.t("grid_points"));
  o.bisection_tol = c.t("bisection_tol");
  o.min_r_squared = c.t("min_r_squared");
  o.threads = c.threads;
  return o;
}

CovarianceOptions covariance_options(const Context& c) {
  CovarianceOptions o;
  o.restarts = static_cast<int>(c.t("restarts"));
  o.tol = c.t("covariance_tol");
  o.seed = c.seed;
  o.threads = c.threads;
  return o;
}

LogSobolevOptions ls_options(const Context& c) {
  LogSobolevOptions o;
  o.restarts = static_cast<int>(c.t("ls_restarts"));
  o.max_iterations = static_cast<int>(c.t("ls_iterations"));
  o.entropy_floor = c.t("entropy_floor");
  o.seed = c.seed;
  o.threads = c.threads;
  return o;
}

std::vector<Matrix> probes(const Context& c, const Region& y) {
  std::vector<std::string> labels = c.experiment().probes;
  if (labels.empty()) labels = {"Z"};
  std::vector<Matrix> out;
  for (const auto& s : labels) {
    if (s.size() != y.size())
      throw ShapeMismatch("probe \"" + s + "\" does not match the " + std::to_string(y.size()) + " sites of Y");
    out.push_back(pauli::string(s));
  }
  return out;
}

// Sites at distance exactly d from `from`.
Region shell(const Region& from, int d) {
  std::vector<int> s;
  for (int k = 0; k < from.lattice().size(); ++k)
    if (site_distance(from, k) == d) s.push_back(k);
  if (s.empty()) throw ShapeMismatch("no sites at distance " + std::to_string(d));
  return Region(from.lattice(), s);
}

std::vector<Region> shells(const Region& from, const std::vector<int>& ds) {
  std::vector<Region> out;
  for (int d : ds) out.push_back(shell(from, d));
  return out;
}

ExperimentOptions experiment_options(const Context& c) {
  return {c.model.name, c.seed, c.t("slack")};
}

Output run_steady(const Context& c) {
  require_kind(c, false);
  const Liouvillian l = build_liouvillian(c.model);
  const DenseOperator sigma = stationary_state(l);
  const RealVector p = hermitian_eigenvalues(sigma.matrix());
  Output o{"steady", header(c, "steady"), {"index", "eigenvalue"}, {}, std::nullopt};
  o.summary["dim"] = l.dim();
  o.summary["min_eigenvalue"] = p.minCoeff();
  o.summary["inverse_norm"] = json_number(inverse_norm(sigma.matrix()));
  o.summary["residual"] = l.apply(sigma.matrix()).norm();
  o.summary["state"] = matrix_json(sigma.matrix());
  for (long k = 0; k < p.size(); ++k) o.rows.push_back({static_cast<double>(k), p(k)});
  return o;
}

const char* method_name(GapMethod m) {
  switch (m) {
    case GapMethod::automatic: return "automatic";
    case GapMethod::dense: return "dense";
    case GapMethod::lanczos: return "lanczos";
    case GapMethod::arnoldi: return "arnoldi";
  }
  return "automatic";
}

Output run_gap(const Context& c) {
  require_kind(c, false);
  const GapResult g = spectral_gap(build_liouvillian(c.model));
  Output o{"gap", header(c, "gap"), {"s", "lambda_s"}, {}, std::nullopt};
  o.summary["gap"] = g.gap;
  o.summary["method"] = method_name(g.method);
  o.summary["reversible"] = g.reversible;
  o.summary["chi2_mismatch"] = g.chi2_mismatch;
  for (const auto& [s, lam] : g.chi2) o.rows.push_back({s, lam});
  return o;
}

Output run_lsobolev(const Context& c) {
  require_kind(c, false);
  const Liouvillian l = build_liouvillian(c.model);
  const WeightedContext ctx(stationary_state(l), c.t("s"));
  const LogSobolevResult r = log_sobolev_estimate(l, ctx, ls_options(c));
  Output o{"lsobolev", header(c, "lsobolev"), {"restart", "ratio"}, {}, std::nullopt};
  o.summary["estimate"] = r.estimate;
  o.summary["variational"] = r.variational;
  o.summary["linearized"] = r.linearized;
  o.summary["s"] = c.t("s");
  o.summary["note"] = "upper estimate: min of the variational and linearized values";
  for (std::size_t k = 0; k < r.per_restart.size(); ++k)
    o.rows.push_back({static_cast<double>(k), r.per_restart[k]});
  return o;
}

Output run_reversibility(const Context& c) {
  require_kind(c, false);
  const Liouvillian l = build_liouvillian(c.model);
  const DenseOperator sigma = stationary_state(l);
  Output o{"reversibility", header(c, "reversibility"), {"s", "reversible", "residual", "scale"}, {}, std::nullopt};
  ojson list = ojson::array();
  for (double s : {0.0, 0.5, 1.0}) {
    const ReversibilityCheck r = check_s_reversibility(l, WeightedContext(sigma, s), false, c.t("reversibility_tol"));
    list.push_back(ojson{{"s", s}, {"reversible", r.reversible}, {"residual", r.residual}, {"scale", r.scale}});
    o.rows.push_back({s, r.reversible ? 1.0 : 0.0, r.residual, r.scale});
  }
  o.summary["checks"] = list;
  return o;
}

Output run_correlations(const Context& c) {
  require_kind(c, false);
  const Liouvillian l = build_liouvillian(c.model);
  const DenseOperator sigma = stationary_state(l);
  const CorrelationInequalities q =
      correlation_inequalities(sigma, c.region("A"), c.region("B"), covariance_options(c));
  Output o{"correlations", header(c, "correlations"), {"quantity", "value"}, {}, std::nullopt};
  o.summary["covariance"] = q.values.covariance;
  o.summary["trace_norm"] = q.values.trace_norm;
  o.summary["mutual_info_nats"] = q.values.mutual_info;
  o.summary["d_ab"] = q.values.d_ab;
  o.summary["inv_norm_ab"] = json_number(q.values.inv_norm_ab);
  o.summary["slack_covariance_lower"] = q.slack_covariance_lower();
  o.summary["slack_covariance_upper"] = q.slack_covariance_upper();
  o.summary["slack_mutual_info_lower"] = q.slack_mutual_info_lower();
  o.summary["slack_mutual_info_upper"] = json_number(q.slack_mutual_info_upper());
  o.summary["holds"] = q.holds();
  o.columns = {"C", "T", "I", "slack_TC_lower", "slack_TC_upper", "slack_TI_lower", "slack_TI_upper"};
  o.rows.push_back({q.values.covariance, q.values.trace_norm, q.values.mutual_info, q.slack_covariance_lower(),
                    q.slack_covariance_upper(), q.slack_mutual_info_lower(), q.slack_mutual_info_upper()});
  return o;
}

Output from_report(ExperimentReport r) {
  Output o;
  o.kind = kind_name(r.kind);
  o.summary = ojson::parse(report_json(r));
  o.report = std::move(r);
  return o;
}

Region light_cone_origin(const Context& c) {
  const auto& r = c.experiment().regions;
  return c.region(r.count("Y") ? "Y" : "A");
}

Output run_lightcone(const Context& c) {
  require_kind(c, false);
  const Liouvillian l = build_liouvillian(c.model);
  const Region y = light_cone_origin(c);
  const auto est = estimate_velocity(l, probes(c, y), y, c.distances(), lightcone_options(c));
  ExperimentReport r = lightcone_report(est, experiment_options(c));
  r.parameters["min_r_squared"] = c.t("min_r_squared");
  return from_report(std::move(r));
}

Output run_clustering(const Context& c, Measure measure) {
  require_kind(c, false);
  const Liouvillian l = build_liouvillian(c.model);
  const Region a = c.region("A");
  ClusteringOptions o;
  o.measure = measure;
  o.slack = c.t("slack");
  o.velocity = c.given("velocity");
  o.gap = c.given("gap");
  o.ls_constant = c.given("ls_constant");
  o.lightcone = lightcone_options(c);
  o.log_sobolev = ls_options(c);
  o.covariance = covariance_options(c);
  o.model_id = c.model.name;
  o.seed = c.seed;
  return from_report(clustering_experiment(l, a, shells(a, c.distances()), o));
}

Output run_lppl(const Context& c) {
  require_kind(c, false);
  if (!c.experiment().perturbation) throw ShapeMismatch("the model's experiment block has no perturbation");
  const Liouvillian l = build_liouvillian(c.model);
  const LocalTerm q = build_term(c.model, *c.experiment().perturbation);
  return from_report(lppl_experiment(l, q, shells(q.support, c.distances()), experiment_options(c)));
}

std::vector<int> blocks(const Context& c) {
  if (c.experiment().blocks.empty()) throw ShapeMismatch("the model's experiment block lists no blocks");
  return c.experiment().blocks;
}

Output run_arealaw(const Context& c) {
  if (c.model.kind == ModelKind::fermion)
    return from_report(area_law_experiment(build_fermion(c.model), blocks(c), experiment_options(c)));
  const Liouvillian l = build_liouvillian(c.model);
  std::vector<Region> regions;
  for (int len : blocks(c)) {
    std::vector<int> s(len);
    for (int k = 0; k < len; ++k) s[k] = k;
    regions.emplace_back(c.model.lattice(), s);
  }
  return from_report(area_law_experiment(l, regions, experiment_options(c)));
}

Output run_fermion_steady(const Context& c) {
  require_kind(c, true);
  const QuadraticLiouvillian ql = build_fermion(c.model);
  const CovarianceMatrix gamma = stationary_covariance(ql);
  const RealVector modes = normal_modes(gamma);
  const GaussianMinEigenvalue mn = gaussian_min_eigenvalue(gamma);
  Output o{"fermion-steady", header(c, "fermion-steady"), {"mode", "c"}, {}, std::nullopt};
  o.summary["modes"] = ql.modes();
  o.summary["lyapunov_residual"] = lyapunov_residual(ql, gamma.gamma());
  o.summary["gap"] = fermion_gap(ql);
  o.summary["covariance_decay_rate"] = covariance_decay_rate(ql);
  o.summary["min_eigenvalue"] = mn.value;
  o.summary["pure"] = mn.pure;
  o.summary["inverse_norm"] = json_number(mn.value > 0.0 ? 1.0 / mn.value : std::numeric_limits<double>::infinity());
  for (long k = 0; k < modes.size(); ++k) o.rows.push_back({static_cast<double>(k), modes(k)});
  return o;
}

Output run_fermion_mi(const Context& c) {
  require_kind(c, true);
  const CovarianceMatrix gamma = stationary_covariance(build_fermion(c.model));
  const Region a = c.region("A"), b = c.region("B");
  const FermionMutualInformation mi = fermion_mutual_information(gamma, a, b);
  Output o{"fermion-mi", header(c, "fermion-mi"), {"quantity", "value"}, {}, std::nullopt};
  o.summary["mutual_info_bits"] = mi.bits;
  o.summary["mutual_info_nats"] = mi.nats;
  o.columns = {"mutual_info_bits", "mutual_info_nats"};
  o.rows.push_back({mi.bits, mi.nats});
  if (a.size() == b.size()) {
    const FermionBoundReport r = fermion_bound_report(gamma, a, b);
    o.summary["bound"] = ojson{{"n", r.n},
                               {"norm_gamma_ab", r.norm_gamma_ab},
                               {"norm_xi_ab", r.norm_xi_ab},
                               {"norm_gamma_c", r.norm_gamma_c},
                               {"covariance_proxy", r.covariance_proxy},
                               {"bound", json_number(r.bound)},
                               {"vacuous", r.vacuous},
                               {"slack", json_number(r.slack)},
                               {"holds", r.holds()}};
  }
  return o;
}

using Runner = Output (*)(const Context&);

std::string csv_of(const Output& o) {
  if (o.report) return report_csv(*o.report);
  std::ostringstream out;
  for (std::size_t k = 0; k < o.columns.size(); ++k) out << (k ? "," : "") << o.columns[k];
  out << "\n";
  for (const auto& row : o.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << number(row[k]);
    out << "\n";
  }
  return out.str();
}

std::string json_of(const Output& o) { return o.report ? report_json(*o.report) : o.summary.dump(2) + "\n"; }

void write(const Output& o, const Context& c, const std::string& dir) {
  if (dir.empty()) return;
  if (o.report) {
    write_report(*o.report, dir);
    return;
  }
  std::filesystem::create_directories(dir);
  const std::string stem = c.model.name + "." + o.kind + "." + std::to_string(c.seed);
  std::ofstream(std::filesystem::path(dir) / (stem + ".json")) << json_of(o);
  std::ofstream(std::filesystem::path(dir) / (stem + ".csv")) << csv_of(o);
}

// Every experiment the model has inputs for, plus an index of the verdicts.
Output run_report(const Context& c, const std::string& dir) {
  std::vector<Output> parts;
  const auto& e = c.experiment();
  if (c.model.kind == ModelKind::fermion) {
    if (!e.blocks.empty()) parts.push_back(run_arealaw(c));
  } else {
    const bool has_a = e.regions.count("A") > 0, has_y = has_a || e.regions.count("Y") > 0;
    if (has_y && !e.distances.empty()) parts.push_back(run_lightcone(c));
    if (has_a && !e.distances.empty()) parts.push_back(run_clustering(c, Measure::covariance));
    if (e.perturbation && !e.distances.empty()) parts.push_back(run_lppl(c));
    if (!e.blocks.empty()) parts.push_back(run_arealaw(c));
  }
  if (parts.empty()) throw ShapeMismatch("the model's experiment block configures no experiment");
  Output o{"report", header(c, "report"), {"experiment", "passed"}, {}, std::nullopt};
  ojson list = ojson::array();
  for (std::size_t k = 0; k < parts.size(); ++k) {
    write(parts[k], c, dir);
    const bool passed = parts[k].report->passed;
    list.push_back(ojson{{"kind", parts[k].kind}, {"passed", passed}});
    o.rows.push_back({static_cast<double>(k), passed ? 1.0 : 0.0});
  }
  o.summary["experiments"] = list;
  return o;
}

Context make_context(const Flags& f) {
  Context c;
  c.model = load_model(f.model_path);
  c.seed = f.seed_given ? f.seed : c.experiment().seed;
  c.threads = f.threads;
  c.tol = kTolerances;
  auto set = [&](const std::string& name, double v, const std::string& where) {
    if (c.tol.count(name))
      c.tol[name] = v;
    else if (std::find(kOverrides.begin(), kOverrides.end(), name) != kOverrides.end())
      c.overrides[name] = v;
    else
      throw ShapeMismatch("unknown tolerance \"" + name + "\" in " + where);
  };
  for (const auto& [k, v] : c.experiment().tolerances) set(k, v, "the model file");
  for (const auto& entry : f.tol) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw ShapeMismatch("--tol expects NAME=VALUE, got \"" + entry + "\"");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(entry.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != entry.size() - eq - 1) throw ShapeMismatch("--tol value is not a number: " + entry);
    set(entry.substr(0, eq), v, "--tol");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixing, correlation and light-cone computations for open quantum lattice systems"};
  app.require_subcommand(1);
  Flags flags;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"steady", "stationary state of a spin or Davies model"},
      {"gap", "spectral gap and chi-square constants"},
      {"lsobolev", "Log-Sobolev upper estimate"},
      {"reversibility", "detailed-balance check for s = 0, 1/2, 1"},
      {"correlations", "covariance, trace and mutual-information correlations of regions A and B"},
      {"lightcone", "Lieb-Robinson velocity fit"},
      {"clustering", "decay of stationary correlations with distance"},
      {"lppl", "effect of a local perturbation on the stationary state"},
      {"arealaw", "block mutual information against block size"},
      {"fermion-steady", "stationary covariance matrix of a quadratic fermion model"},
      {"fermion-mi", "Gaussian mutual information of regions A and B"},
      {"report", "every experiment configured in the model file"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("model", flags.model_path, "model file (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { flags.seed = v, flags.seed_given = true; },
        "seed of randomized routines (default: the model's experiment seed, else 0)");
    s->add_option("--threads", flags.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    s->add_option("--out", flags.out, "directory for JSON and CSV artifacts");
    s->add_option("--tol", flags.tol, "override a tolerance, NAME=VALUE; repeatable");
    s->add_option("--format", flags.format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
    if (name == "clustering")
      s->add_option("--measure", flags.measure, "C for covariance, I for mutual information")
          ->check(CLI::IsMember({"C", "I"}));
    subs[name] = s;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const Context c = make_context(flags);
    std::string name;
    for (const auto& [n, s] : subs)
      if (s->parsed()) name = n;
    const std::map<std::string, Runner> runners = {
        {"steady", run_steady},
        {"gap", run_gap},
        {"lsobolev", run_lsobolev},
        {"reversibility", run_reversibility},
        {"correlations", run_correlations},
        {"lightcone", run_lightcone},
        {"lppl", run_lppl},
        {"arealaw", run_arealaw},
        {"fermion-steady", run_fermion_steady},
        {"fermion-mi", run_fermion_mi},
    };
    Output o;
    if (name == "clustering")
      o = run_clustering(c, flags.measure == "I" ? Measure::mutual_info : Measure::covariance);
    else if (name == "report")
      o = run_report(c, flags.out);
    else
      o = runners.at(name)(c);
    write(o, c, flags.out);
    std::cout << (flags.format == "csv" ? csv_of(o) : json_of(o));
    return 0;
  } catch (const InputError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "Error: " << e.what() << "\n";
    return 3;
  }
}
