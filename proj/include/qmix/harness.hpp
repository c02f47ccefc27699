#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmix/correlations.hpp"
#include "qmix/fermion.hpp"
#include "qmix/mixing.hpp"
#include "qmix/spin_system.hpp"

namespace qmix {

/// ||f_t - f_t^B|| (operator norm), where f acts on `y`, f_t evolves under the
/// full generator and f_t^B under the terms supported inside B.
double lr_deviation(const Liouvillian& l, const Matrix& f, const Region& y, const Region& b,
                    double t);

/// Deviation at every time of an increasing list, evolving incrementally.
std::vector<double> lr_deviation_series(const Liouvillian& l, const Matrix& f, const Region& y,
                                        const Region& b, const std::vector<double>& times);

/// ||(fg)_t - f_t g_t|| for f on A and g on B, all in the Heisenberg picture.
double split_deviation(const Liouvillian& l, const Matrix& f, const Region& a, const Matrix& g,
                       const Region& b, double t);

struct LightConeOptions {
  double epsilon = 1e-6;
  double t_min = 1e-3;
  double t_max = 20.0;
  int grid_points = 40;
  /// Relative width at which the crossing bisection stops.
  double bisection_tol = 1e-6;
  double min_r_squared = 0.9;
  int threads = 0;
};

struct LightConeEstimate {
  double velocity = 0.0;
  /// (D, t_cross) with D = d(Y, complement of B).
  std::vector<std::pair<int, double>> contour;
  double fit_quality = 0.0;
  double threshold = 0.0;
  /// R^2 reached the acceptance level.
  bool accepted = false;
};

/// Crossing times of lr_deviation through epsilon for B = Y plus a buffer of
/// radius D - 1, fitted linearly in D; v = 1 / slope. With several probes the
/// deviation is the largest among them.
LightConeEstimate estimate_velocity(const Liouvillian& l, const std::vector<Matrix>& probes,
                                    const Region& y, const std::vector<int>& distances,
                                    const LightConeOptions& options = {});

LightConeEstimate estimate_velocity(const Liouvillian& l, const Matrix& probe, const Region& y,
                                    const std::vector<int>& distances,
                                    const LightConeOptions& options = {});

/// Geometric grid of `points` times in [t_min, t_max].
std::vector<double> geometric_grid(double t_min, double t_max, int points);

enum class ExperimentKind { clustering_C, clustering_I, lppl, arealaw, lightcone };

std::string kind_name(ExperimentKind kind);

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::clustering_C;
  std::string model_id = "model";
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::optional<double> fitted_rate;
  std::optional<double> theory_rate;
  bool passed = false;
  /// Inputs and tolerances the verdict depends on.
  std::map<std::string, double> parameters;
  std::vector<std::string> notes;
};

/// Rows below this are exact zeros and stay out of log fits.
inline constexpr double kZeroRow = 1e-13;

/// Decay rate r of value ~ e^{-r x} from the rows with value >= kZeroRow;
/// empty when fewer than three such rows exist.
std::optional<double> fit_decay_rate(const std::vector<double>& x, const std::vector<double>& values);

enum class Measure { covariance, mutual_info };

struct ClusteringOptions {
  Measure measure = Measure::covariance;
  double slack = 0.1;
  /// Measured inputs; computed when absent. The velocity is then fitted from
  /// X, Y and Z probes at the first site of A over every distance that
  /// leaves sites outside B.
  std::optional<double> velocity;
  std::optional<double> gap;
  std::optional<double> ls_constant;
  LightConeOptions lightcone;
  LogSobolevOptions log_sobolev;
  CovarianceOptions covariance;
  std::string model_id = "model";
  std::uint64_t seed = 0;
};

/// Correlations of the stationary state between A and each B, with the
/// fitted decay rate compared against lambda/(v + 2 lambda) for the
/// covariance and alpha/(2(v + alpha)) for the mutual information.
ExperimentReport clustering_experiment(const Liouvillian& l, const Region& a,
                                       const std::vector<Region>& bs,
                                       const ClusteringOptions& options = {});

struct ExperimentOptions {
  std::string model_id = "model";
  std::uint64_t seed = 0;
  double slack = 0.1;
};

/// ||rho_B - sigma_B||_1 for the stationary states of L + Q and L.
ExperimentReport lppl_experiment(const Liouvillian& l, const LocalTerm& perturbation,
                                 const std::vector<Region>& probes,
                                 const ExperimentOptions& options = {});

/// I(A : complement) for blocks A = {0, ..., l-1} of a fermionic chain;
/// passes when the two largest blocks agree within the relative slack.
ExperimentReport area_law_experiment(const QuadraticLiouvillian& ql,
                                     const std::vector<int>& block_lengths,
                                     const ExperimentOptions& options = {});

/// I(A : complement) per boundary site for spin blocks; passes when the
/// largest block's ratio stays within (1 + slack) of the smaller blocks' maximum.
ExperimentReport area_law_experiment(const Liouvillian& l, const std::vector<Region>& blocks,
                                     const ExperimentOptions& options = {});

/// Light-cone contour as a report.
ExperimentReport lightcone_report(const LightConeEstimate& estimate,
                                  const ExperimentOptions& options = {});

struct TrajectoryCheck {
  /// max over times of ||rho_t - sigma||_1 - sqrt(inv_norm) e^{-lambda t}.
  double worst_margin = 0.0;
  int violations = 0;
};

/// Checks ||rho_t - sigma||_1 <= sqrt(||sigma^{-1}||) e^{-lambda t} along one trajectory.
TrajectoryCheck chi2_trajectory_check(const Liouvillian& l, const Matrix& rho0,
                                      const std::vector<double>& times, double lambda,
                                      const Matrix& sigma, double tol = 1e-10);

std::string report_json(const ExperimentReport& report);
std::string report_csv(const ExperimentReport& report);
/// Writes {model_id}.{kind}.{seed}.json and .csv into `dir`.
std::pair<std::filesystem::path, std::filesystem::path> write_report(
    const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace qmix
