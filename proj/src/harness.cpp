#include "qmix/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "json.hpp"
#include "qmix/errors.hpp"
#include "qmix/linalg.hpp"
#include "qmix/parallel.hpp"

namespace qmix {

namespace {

constexpr Picture kHeis = Picture::heisenberg;

Matrix embed_on(const Liouvillian& l, const Matrix& op, const Region& support) {
  if (!(support.lattice() == l.lattice())) throw ShapeMismatch("region and generator lattices differ");
  return embed_matrix(op, support.sites(), l.lattice().size(), l.local_dim());
}

Region with_buffer(const Region& y, int distance) {
  if (distance < 1) throw ShapeMismatch("light-cone distances start at 1");
  return distance == 1 ? y : y.unite(buffer_region(y, distance - 1));
}

// Observable pair (full, restricted) carried along a time grid.
struct ProbePair {
  Matrix full, local;
  double t = 0.0;
};

ProbePair advance(const Liouvillian& l, const Liouvillian& lb, const ProbePair& p, double t) {
  if (t <= p.t) return p;
  return {evolve(l, p.full, t - p.t, kHeis), evolve(lb, p.local, t - p.t, kHeis), t};
}

double gap_of(const ProbePair& p) { return operator_norm(p.full - p.local); }

// Probes evolved in lockstep; the deviation is the largest over the set.
struct ProbeSet {
  std::vector<ProbePair> pairs;
  double t = 0.0;
};

ProbeSet advance(const Liouvillian& l, const Liouvillian& lb, const ProbeSet& s, double t) {
  if (t <= s.t) return s;
  ProbeSet out{{}, t};
  for (const auto& p : s.pairs) out.pairs.push_back(advance(l, lb, p, t));
  return out;
}

double gap_of(const ProbeSet& s) {
  double g = 0.0;
  for (const auto& p : s.pairs) g = std::max(g, gap_of(p));
  return g;
}

// First time the deviation exceeds epsilon, NaN when it never does up to the
// last grid time. Before the first grid time the bracket is [0, t_min], the
// deviation vanishing at t = 0.
double crossing_time(const Liouvillian& l, const std::vector<Matrix>& fs, const Region& b,
                     const std::vector<double>& grid, const LightConeOptions& opt) {
  const Liouvillian lb = restrict_to_region(l, b);
  ProbeSet lo;
  for (const auto& f : fs) lo.pairs.push_back({f, f, 0.0});
  for (double t : grid) {
    ProbeSet next = advance(l, lb, lo, t);
    if (gap_of(next) > opt.epsilon) {
      double hi = t;
      while (hi - lo.t > opt.bisection_tol * hi) {
        const double mid = 0.5 * (lo.t + hi);
        ProbeSet m = advance(l, lb, lo, mid);
        if (gap_of(m) > opt.epsilon)
          hi = mid;
        else
          lo = std::move(m);
      }
      return 0.5 * (lo.t + hi);
    }
    lo = std::move(next);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  return number(x);
}

std::vector<double> column(const ExperimentReport& r, std::size_t k) {
  std::vector<double> out;
  for (const auto& row : r.rows) out.push_back(row[k]);
  return out;
}

bool nonincreasing(const std::vector<double>& v, double tol) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1] + tol) return false;
  return true;
}

}  // namespace

std::vector<double> geometric_grid(double t_min, double t_max, int points) {
  if (!(t_min > 0.0 && t_max > t_min) || points < 2)
    throw ShapeMismatch("geometric grid needs 0 < t_min < t_max and two points");
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k)
    grid[k] = t_min * std::pow(t_max / t_min, static_cast<double>(k) / (points - 1));
  grid.back() = t_max;
  return grid;
}

std::vector<double> lr_deviation_series(const Liouvillian& l, const Matrix& f, const Region& y,
                                        const Region& b, const std::vector<double>& times) {
  if (!y.subset_of(b)) throw SupportNotContained("observable support is not inside B");
  const Liouvillian lb = restrict_to_region(l, b);
  const Matrix full = embed_on(l, f, y);
  ProbePair p{full, full, 0.0};
  std::vector<double> out;
  for (double t : times) {
    if (t < p.t) throw ShapeMismatch("times must be nonnegative and increasing");
    p = advance(l, lb, p, t);
    out.push_back(gap_of(p));
  }
  return out;
}

double lr_deviation(const Liouvillian& l, const Matrix& f, const Region& y, const Region& b,
                    double t) {
  if (t < 0.0) throw ShapeMismatch("time must be nonnegative");
  return lr_deviation_series(l, f, y, b, {t}).front();
}

double split_deviation(const Liouvillian& l, const Matrix& f, const Region& a, const Matrix& g,
                       const Region& b, double t) {
  if (a.intersects(b)) throw OverlappingRegions("supports of f and g overlap");
  if (t < 0.0) throw ShapeMismatch("time must be nonnegative");
  const Matrix ff = embed_on(l, f, a), gg = embed_on(l, g, b);
  const Matrix fg_t = evolve(l, Matrix(ff * gg), t, kHeis);
  return operator_norm(fg_t - evolve(l, ff, t, kHeis) * evolve(l, gg, t, kHeis));
}

LightConeEstimate estimate_velocity(const Liouvillian& l, const std::vector<Matrix>& probes,
                                    const Region& y, const std::vector<int>& distances,
                                    const LightConeOptions& options) {
  if (probes.empty()) throw ShapeMismatch("no probe observables");
  std::vector<int> ds = distances;
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  if (ds.size() < 3) throw InsufficientRows("light-cone fit needs three distinct distances");
  std::vector<Matrix> fs;
  for (const auto& p : probes) fs.push_back(embed_on(l, p, y));
  const auto grid = geometric_grid(options.t_min, options.t_max, options.grid_points);

  std::vector<double> crossings(ds.size());
  parallel_for(
      ds.size(),
      [&](std::size_t k) {
        const Region b = with_buffer(y, ds[k]);
        if (b.size() == static_cast<std::size_t>(l.lattice().size()))
          throw NoCrossing("distance " + std::to_string(ds[k]) + " leaves no sites outside B");
        crossings[k] = crossing_time(l, fs, b, grid, options);
      },
      options.threads);

  LightConeEstimate est;
  est.threshold = options.epsilon;
  std::vector<double> x, t;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    if (std::isnan(crossings[k]))
      throw NoCrossing("deviation at D = " + std::to_string(ds[k]) + " stays below " +
                       number(options.epsilon) + " up to t = " + number(options.t_max));
    est.contour.emplace_back(ds[k], crossings[k]);
    x.push_back(ds[k]);
  }
  const LinearFit fit = linear_fit(x, crossings);
  est.fit_quality = fit.r_squared;
  est.velocity = fit.slope > 0.0 ? 1.0 / fit.slope : std::numeric_limits<double>::infinity();
  est.accepted = fit.slope > 0.0 && fit.r_squared >= options.min_r_squared;
  return est;
}

LightConeEstimate estimate_velocity(const Liouvillian& l, const Matrix& probe, const Region& y,
                                    const std::vector<int>& distances,
                                    const LightConeOptions& options) {
  return estimate_velocity(l, std::vector<Matrix>{probe}, y, distances, options);
}

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::clustering_C: return "clustering_C";
    case ExperimentKind::clustering_I: return "clustering_I";
    case ExperimentKind::lppl: return "lppl";
    case ExperimentKind::arealaw: return "arealaw";
    case ExperimentKind::lightcone: return "lightcone";
  }
  return "unknown";
}

std::optional<double> fit_decay_rate(const std::vector<double>& x, const std::vector<double>& values) {
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (values[k] >= kZeroRow) {
      xs.push_back(x[k]);
      ys.push_back(std::log(values[k]));
    }
  if (xs.size() < 3) return std::nullopt;
  return -linear_fit(xs, ys).slope;
}

ExperimentReport clustering_experiment(const Liouvillian& l, const Region& a,
                                       const std::vector<Region>& bs,
                                       const ClusteringOptions& options) {
  if (bs.empty()) throw InsufficientRows("no probe regions");
  const DenseOperator sigma = stationary_state(l);

  ExperimentReport r;
  r.kind = options.measure == Measure::covariance ? ExperimentKind::clustering_C
                                                  : ExperimentKind::clustering_I;
  r.model_id = options.model_id;
  r.seed = options.seed;
  r.columns = {"D", "C", "T", "I", "slack_TC_lower", "slack_TC_upper", "slack_TI_lower",
               "slack_TI_upper"};
  std::vector<std::vector<double>> rows(bs.size());
  CovarianceOptions cov = options.covariance;
  cov.seed = options.seed;
  cov.threads = 1;
  parallel_for(bs.size(), [&](std::size_t k) {
    const CorrelationInequalities q = correlation_inequalities(sigma, a, bs[k], cov);
    rows[k] = {static_cast<double>(region_distance(a, bs[k])), q.values.covariance,
               q.values.trace_norm, q.values.mutual_info, q.slack_covariance_lower(),
               q.slack_covariance_upper(), q.slack_mutual_info_lower(), q.slack_mutual_info_upper()};
  });
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& x, const auto& y) { return x[0] < y[0]; });
  r.rows = std::move(rows);

  const std::size_t col = options.measure == Measure::covariance ? 1 : 3;
  const auto values = column(r, col);
  const bool all_zero = std::all_of(values.begin(), values.end(), [](double v) { return v < kZeroRow; });
  r.parameters["slack"] = options.slack;
  r.parameters["zero_row"] = kZeroRow;
  if (all_zero) {
    r.passed = true;
    r.notes.push_back("all rows vanish: the stationary state is a product across A and B");
    return r;
  }
  r.fitted_rate = fit_decay_rate(column(r, 0), values);
  if (!r.fitted_rate) throw InsufficientRows("fewer than three nonzero rows to fit");

  const double gap = options.gap ? *options.gap : spectral_gap(l).gap;
  double v = 0.0;
  if (options.velocity) {
    v = *options.velocity;
  } else {
    const Region y = Region::single(l.lattice(), a.sites().front());
    std::vector<int> ds;
    for (int d = 1; d <= l.lattice().diameter(); ++d)
      if (with_buffer(y, d).size() < static_cast<std::size_t>(l.lattice().size())) ds.push_back(d);
    if (l.local_dim() != 2) throw Unsupported("default light-cone probes are Pauli operators; pass a velocity");
    const LightConeEstimate est =
        estimate_velocity(l, {pauli::x(), pauli::y(), pauli::z()}, y, ds, options.lightcone);
    v = est.velocity;
    r.parameters["velocity_r_squared"] = est.fit_quality;
  }
  r.parameters["gap"] = gap;
  r.parameters["velocity"] = v;
  r.notes.push_back("velocity is the measured light-cone estimate, not an analytic bound");
  if (options.measure == Measure::covariance) {
    r.theory_rate = gap / (v + 2.0 * gap);
  } else {
    double alpha = 0.0;
    if (options.ls_constant) {
      alpha = *options.ls_constant;
    } else {
      LogSobolevOptions ls = options.log_sobolev;
      ls.seed = options.seed;
      alpha = log_sobolev_estimate(l, WeightedContext(sigma, 0.5), ls).estimate;
    }
    r.parameters["ls_constant"] = alpha;
    r.theory_rate = alpha / (2.0 * (v + alpha));
    r.notes.push_back("Log-Sobolev constant is a variational upper estimate");
  }
  r.passed = nonincreasing(values, 1e-12) && *r.fitted_rate >= *r.theory_rate - options.slack;
  r.notes.push_back("bound prefactors are not reproduced; only decay rates are compared");
  return r;
}

ExperimentReport lppl_experiment(const Liouvillian& l, const LocalTerm& perturbation,
                                 const std::vector<Region>& probes,
                                 const ExperimentOptions& options) {
  if (probes.empty()) throw InsufficientRows("no probe regions");
  std::vector<LocalTerm> terms = l.terms();
  terms.push_back(perturbation);
  const Liouvillian perturbed(l.lattice(), std::move(terms), l.local_dim());
  const DenseOperator sigma = stationary_state(l);
  const DenseOperator rho = stationary_state(perturbed);

  ExperimentReport r;
  r.kind = ExperimentKind::lppl;
  r.model_id = options.model_id;
  r.seed = options.seed;
  r.columns = {"D", "trace_distance"};
  for (const auto& b : probes) {
    const double d = trace_norm(partial_trace(rho, b).matrix() - partial_trace(sigma, b).matrix());
    r.rows.push_back({static_cast<double>(region_distance(perturbation.support, b)), d});
  }
  std::stable_sort(r.rows.begin(), r.rows.end(),
                   [](const auto& x, const auto& y) { return x[0] < y[0]; });
  const auto values = column(r, 1);
  r.fitted_rate = fit_decay_rate(column(r, 0), values);
  r.passed = nonincreasing(values, kZeroRow) && (!r.fitted_rate || *r.fitted_rate > 0.0);
  r.parameters["zero_row"] = kZeroRow;
  return r;
}

ExperimentReport area_law_experiment(const QuadraticLiouvillian& ql,
                                     const std::vector<int>& block_lengths,
                                     const ExperimentOptions& options) {
  if (block_lengths.size() < 2) throw InsufficientRows("need at least two block sizes");
  const CovarianceMatrix gamma = stationary_covariance(ql);
  const Lattice chain = Lattice::chain(ql.modes());
  ExperimentReport r;
  r.kind = ExperimentKind::arealaw;
  r.model_id = options.model_id;
  r.seed = options.seed;
  r.columns = {"block", "boundary", "I_bits", "I_nats"};
  std::vector<int> lengths = block_lengths;
  std::sort(lengths.begin(), lengths.end());
  for (int len : lengths) {
    if (len < 1 || len >= ql.modes()) throw ShapeMismatch("block length outside 1..N-1");
    std::vector<int> sites(len);
    for (int k = 0; k < len; ++k) sites[k] = k;
    const Region a(chain, sites);
    const FermionMutualInformation mi = fermion_mutual_information(gamma, a, a.complement());
    r.rows.push_back({static_cast<double>(len), static_cast<double>(boundary_size(a)), mi.bits, mi.nats});
  }
  const double last = r.rows.back()[2], prev = r.rows[r.rows.size() - 2][2];
  const double variation = std::abs(last - prev) / std::max(std::abs(last), kZeroRow);
  r.parameters["relative_variation"] = variation;
  r.parameters["slack"] = options.slack;
  r.parameters["covariance_decay_rate"] = covariance_decay_rate(ql);
  r.passed = variation < options.slack || (last < kZeroRow && prev < kZeroRow);
  if (!r.passed) r.notes.push_back("no saturation across the two largest blocks");
  return r;
}

ExperimentReport area_law_experiment(const Liouvillian& l, const std::vector<Region>& blocks,
                                     const ExperimentOptions& options) {
  if (blocks.size() < 2) throw InsufficientRows("need at least two blocks");
  const DenseOperator sigma = stationary_state(l);
  ExperimentReport r;
  r.kind = ExperimentKind::arealaw;
  r.model_id = options.model_id;
  r.seed = options.seed;
  r.columns = {"block", "boundary", "I_nats", "I_per_boundary"};
  for (const auto& a : blocks) {
    const int boundary = std::max(1, boundary_size(a));
    const double mi = mutual_information(sigma, a, a.complement());
    r.rows.push_back({static_cast<double>(a.size()), static_cast<double>(boundary), mi, mi / boundary});
  }
  std::stable_sort(r.rows.begin(), r.rows.end(),
                   [](const auto& x, const auto& y) { return x[0] < y[0]; });
  double smaller = 0.0;
  for (std::size_t k = 0; k + 1 < r.rows.size(); ++k) smaller = std::max(smaller, r.rows[k][3]);
  const double last = r.rows.back()[3];
  r.parameters["slack"] = options.slack;
  r.passed = last <= (1.0 + options.slack) * smaller + kZeroRow;
  return r;
}

ExperimentReport lightcone_report(const LightConeEstimate& estimate,
                                  const ExperimentOptions& options) {
  ExperimentReport r;
  r.kind = ExperimentKind::lightcone;
  r.model_id = options.model_id;
  r.seed = options.seed;
  r.columns = {"D", "t_cross"};
  for (const auto& [d, t] : estimate.contour) r.rows.push_back({static_cast<double>(d), t});
  r.parameters["velocity"] = estimate.velocity;
  r.parameters["r_squared"] = estimate.fit_quality;
  r.parameters["epsilon"] = estimate.threshold;
  std::vector<double> t;
  for (const auto& row : r.rows) t.push_back(row[1]);
  bool increasing = true;
  for (std::size_t k = 1; k < t.size(); ++k) increasing = increasing && t[k] > t[k - 1];
  r.passed = estimate.accepted && increasing;
  return r;
}

TrajectoryCheck chi2_trajectory_check(const Liouvillian& l, const Matrix& rho0,
                                      const std::vector<double>& times, double lambda,
                                      const Matrix& sigma, double tol) {
  const double inv = inverse_norm(sigma);
  TrajectoryCheck out;
  out.worst_margin = -std::numeric_limits<double>::infinity();
  Matrix rho = rho0;
  double now = 0.0;
  // Equally spaced times reuse one propagator.
  double step = -1.0;
  Matrix prop;
  const long d = l.dim();
  for (double t : times) {
    if (t < now) throw ShapeMismatch("times must be nonnegative and increasing");
    if (d <= kDenseDim && t > now) {
      if (std::abs(t - now - step) > 1e-13 * step) {
        step = t - now;
        prop = (Matrix(l.superop()) * step).exp();
      }
      rho = unvec(prop * vec(rho), d);
    } else {
      rho = evolve(l, rho, t - now);
    }
    now = t;
    const double margin = trace_norm(rho - sigma) - std::sqrt(inv) * std::exp(-lambda * t);
    out.worst_margin = std::max(out.worst_margin, margin);
    out.violations += margin > tol;
  }
  return out;
}

std::string report_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["kind"] = kind_name(r.kind);
  j["model_id"] = r.model_id;
  j["seed"] = r.seed;
  j["columns"] = r.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json jr = nlohmann::json::array();
    for (double x : row) jr.push_back(json_number(x));
    rows.push_back(jr);
  }
  j["rows"] = rows;
  j["fitted_rate"] = r.fitted_rate ? json_number(*r.fitted_rate) : nlohmann::json(nullptr);
  j["theory_rate"] = r.theory_rate ? json_number(*r.theory_rate) : nlohmann::json(nullptr);
  j["passed"] = r.passed;
  nlohmann::ordered_json params;
  for (const auto& [k, v] : r.parameters) params[k] = json_number(v);
  j["parameters"] = params;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

std::string report_csv(const ExperimentReport& r) {
  std::ostringstream out;
  for (std::size_t k = 0; k < r.columns.size(); ++k) out << (k ? "," : "") << r.columns[k];
  out << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << number(row[k]);
    out << "\n";
  }
  return out.str();
}

std::pair<std::filesystem::path, std::filesystem::path> write_report(
    const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = report.model_id + "." + kind_name(report.kind) + "." +
                           std::to_string(report.seed);
  const auto json_path = dir / (stem + ".json");
  const auto csv_path = dir / (stem + ".csv");
  std::ofstream(json_path) << report_json(report);
  std::ofstream(csv_path) << report_csv(report);
  return {json_path, csv_path};
}

}  // namespace qmix
