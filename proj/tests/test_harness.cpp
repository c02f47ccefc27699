#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qmix/errors.hpp"
#include "qmix/harness.hpp"
#include "qmix/linalg.hpp"
#include "qmix/models.hpp"

using namespace qmix;

namespace {

Liouvillian coupled_chain() { return models::hopping_chain(6, 1.0, 0.5, 0.2, 0.1); }

Region sites(const Lattice& lat, std::vector<int> s) { return Region(lat, std::move(s)); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("deviations vanish at t = 0 and when B is everything") {
  const auto l = coupled_chain();
  const Lattice& lat = l.lattice();
  const Region y = Region::single(lat, 0);
  CHECK(lr_deviation(l, pauli::z(), y, sites(lat, {0, 1, 2}), 0.0) == doctest::Approx(0.0));
  CHECK(lr_deviation(l, pauli::z(), y, Region::all(lat), 2.0) < 1e-12);
  CHECK(split_deviation(l, pauli::z(), y, pauli::x(), Region::single(lat, 5), 0.0) < 1e-14);
  CHECK_THROWS_AS(lr_deviation(l, pauli::z(), sites(lat, {0, 3}), sites(lat, {0, 1}), 0.5),
                  SupportNotContained);
  CHECK_THROWS_AS(split_deviation(l, pauli::z(), y, pauli::x(), y, 0.5), OverlappingRegions);
}

TEST_CASE("lr deviation grows in t and shrinks in D") {
  const auto l = coupled_chain();
  const Lattice& lat = l.lattice();
  const Region y = Region::single(lat, 0);
  // short times only: once dissipation acts, f_t and f_t^B both relax to
  // multiples of the identity and the deviation falls again
  const auto grid = geometric_grid(1e-2, 1.0, 15);
  std::vector<std::vector<double>> by_d;
  for (int d = 1; d <= 4; ++d) {
    const Region b = d == 1 ? y : y.unite(buffer_region(y, d - 1));
    by_d.push_back(lr_deviation_series(l, pauli::z(), y, b, grid));
    const auto& s = by_d.back();
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] >= s[k - 1] - 1e-12);
  }
  for (std::size_t d = 1; d < by_d.size(); ++d)
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(by_d[d][k] <= by_d[d - 1][k] + 1e-12);
  // example configuration: sigma_z at site 0, B = {0, 1, 2}, t = 0.5
  const double at = lr_deviation(l, pauli::z(), y, sites(lat, {0, 1, 2}), 0.5);
  CHECK(at > 0.0);
  CHECK(lr_deviation(l, pauli::z(), y, sites(lat, {0, 1, 2}), 1.0) > at);
  CHECK(lr_deviation(l, pauli::z(), y, sites(lat, {0, 1, 2, 3}), 0.5) < at);

  // the series agrees with one-shot evaluation
  CHECK(lr_deviation(l, pauli::z(), y, sites(lat, {0, 1}), grid[7]) ==
        doctest::Approx(by_d[1][7]).epsilon(1e-9));
}

TEST_CASE("split deviation is small far apart and grows with t") {
  const auto l = coupled_chain();
  const Lattice& lat = l.lattice();
  const Region a = Region::single(lat, 0);
  double prev = 0.0;
  for (double t : {0.05, 0.1, 0.2, 0.4}) {
    const double s = split_deviation(l, pauli::z(), a, pauli::z(), Region::single(lat, 5), t);
    CHECK(s >= prev - 1e-12);
    prev = s;
  }
  const double near = split_deviation(l, pauli::z(), a, pauli::z(), Region::single(lat, 1), 0.2);
  const double far = split_deviation(l, pauli::z(), a, pauli::z(), Region::single(lat, 5), 0.2);
  CHECK(far < near);
  CHECK(far < 1e-3);
}

TEST_CASE("uncoupled chain has no light cone") {
  const auto l = models::depolarizing(6, 0.7);
  const Lattice& lat = l.lattice();
  const Region y = Region::single(lat, 0);
  CHECK(lr_deviation(l, pauli::z(), y, y, 5.0) < 1e-13);
  CHECK(split_deviation(l, pauli::z(), y, pauli::x(), Region::single(lat, 1), 1.0) < 1e-13);
  CHECK_THROWS_AS(estimate_velocity(l, pauli::z(), y, {1, 2, 3}), NoCrossing);
}

TEST_CASE("velocity estimate") {
  const auto l = coupled_chain();
  const Region y = Region::single(l.lattice(), 0);
  const std::vector<Matrix> probes{pauli::x(), pauli::y(), pauli::z()};
  LightConeOptions opt;
  const auto est = estimate_velocity(l, probes, y, {1, 2, 3, 4, 5}, opt);
  CHECK(est.threshold == 1e-6);
  REQUIRE(est.contour.size() == 5);
  for (std::size_t k = 1; k < est.contour.size(); ++k)
    CHECK(est.contour[k].second >= est.contour[k - 1].second);
  CHECK(std::isfinite(est.velocity));
  CHECK(est.velocity > 0.0);
  // D = 1 is reached by a first-order term long before t_min; the bracket
  // below the grid still resolves it
  CHECK(est.contour.front().second < opt.t_min);
  CHECK(est.contour.front().second > 0.0);

  // the deviation at each reported crossing sits on the threshold
  for (const auto& [d, t] : est.contour) {
    const Region b = d == 1 ? y : y.unite(buffer_region(y, d - 1));
    double worst = 0.0;
    for (const auto& p : probes) worst = std::max(worst, lr_deviation(l, p, y, b, t));
    CHECK(worst == doctest::Approx(1e-6).epsilon(1e-3));
  }

  // stronger hopping moves the front faster
  const auto fast = estimate_velocity(models::hopping_chain(6, 2.0, 0.5, 0.2, 0.1), probes, y,
                                      {1, 2, 3, 4, 5}, opt);
  CHECK(fast.velocity > est.velocity);

  CHECK_THROWS_AS(estimate_velocity(l, pauli::z(), y, {1, 2}), InsufficientRows);
  CHECK_THROWS_AS(estimate_velocity(l, pauli::z(), y, {3, 4, 5, 6}), NoCrossing);
}

TEST_CASE("geometric grid") {
  const auto g = geometric_grid(1e-3, 20.0, 40);
  REQUIRE(g.size() == 40);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 20.0);
  for (std::size_t k = 2; k < g.size(); ++k)
    CHECK(g[k] / g[k - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-12));
  CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 5), ShapeMismatch);
}

TEST_CASE("decay-rate fit skips exact zeros") {
  CHECK(!fit_decay_rate({1, 2, 3}, {1.0, 0.0, 0.0}).has_value());
  const auto r = fit_decay_rate({1, 2, 3, 4}, {std::exp(-1.5), std::exp(-3.0), std::exp(-4.5), 0.0});
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("product stationary state gives all-zero clustering rows") {
  const auto l = models::depolarizing(4, 1.0);
  const Lattice& lat = l.lattice();
  const Region a = Region::single(lat, 0);
  ClusteringOptions opt;
  opt.velocity = 1.0;
  opt.gap = 1.0;
  opt.ls_constant = 1.0;
  for (Measure m : {Measure::covariance, Measure::mutual_info}) {
    opt.measure = m;
    const auto r = clustering_experiment(l, a, {Region::single(lat, 1), Region::single(lat, 2),
                                                Region::single(lat, 3)},
                                         opt);
    CHECK(r.passed);
    CHECK(!r.fitted_rate.has_value());
    for (const auto& row : r.rows) {
      CHECK(row[1] < kZeroRow);
      CHECK(row[3] < kZeroRow);
    }
  }
}

TEST_CASE("clustering on a thermal chain") {
  const auto l = models::davies_ising_chain(6, 1.0, 0.3, 1.0, 1.0);
  const Lattice& lat = l.lattice();
  const Region a = Region::single(lat, 0);
  std::vector<Region> bs;
  for (int d = 1; d <= 4; ++d) bs.push_back(Region::single(lat, d));
  ClusteringOptions opt;
  opt.velocity = 10.0;
  opt.gap = 1.7;
  opt.model_id = "ising6";
  const auto r = clustering_experiment(l, a, bs, opt);
  REQUIRE(r.rows.size() == 4);
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    CHECK(r.rows[k][0] == static_cast<double>(k + 1));
    for (int s = 4; s < 8; ++s) CHECK(r.rows[k][s] >= -1e-9);
  }
  for (std::size_t k = 1; k < r.rows.size(); ++k) CHECK(r.rows[k][1] < r.rows[k - 1][1]);
  REQUIRE(r.fitted_rate.has_value());
  CHECK(*r.theory_rate == doctest::Approx(1.7 / (10.0 + 3.4)));
  CHECK(r.passed);
  CHECK(r.kind == ExperimentKind::clustering_C);

  opt.measure = Measure::mutual_info;
  opt.ls_constant = 0.5;
  const auto ri = clustering_experiment(l, a, bs, opt);
  CHECK(*ri.theory_rate == doctest::Approx(0.5 / (2.0 * 10.5)));
  CHECK(ri.kind == ExperimentKind::clustering_I);
}

TEST_CASE("local perturbation of a driven chain") {
  const auto l = models::hopping_chain(6, 1.0, 0.5, 2.0, 1.0);
  const Lattice& lat = l.lattice();
  const LocalTerm q{Region::single(lat, 0), std::nullopt,
                    {Matrix(std::sqrt(2.0) * pauli::lowering())}};
  std::vector<Region> probes;
  for (int d = 1; d <= 5; ++d) probes.push_back(Region::single(lat, d));
  const auto r = lppl_experiment(l, q, probes);
  CHECK(r.passed);
  for (std::size_t k = 1; k < r.rows.size(); ++k) CHECK(r.rows[k][1] < r.rows[k - 1][1]);
  CHECK(r.rows[3][0] == 4.0);
  CHECK(r.rows[3][1] <= 1e-3);
  REQUIRE(r.fitted_rate.has_value());
  CHECK(*r.fitted_rate > 0.0);

  // without coupling only the perturbed site moves
  const auto u = models::depolarizing(4, 1.0);
  const LocalTerm qu{Region::single(u.lattice(), 0), std::nullopt, {Matrix(pauli::lowering())}};
  const auto ru = lppl_experiment(u, qu, {Region::single(u.lattice(), 0), Region::single(u.lattice(), 2)});
  CHECK(ru.rows[0][1] > 0.1);
  CHECK(ru.rows[1][1] < kZeroRow);
  CHECK(ru.passed);
}

TEST_CASE("fermionic area law") {
  const auto gapped = uniform_chain(200, 1.0, 0.5, 0.3, 0.4, 0.1);
  const auto r = area_law_experiment(gapped, {10, 25, 50, 100});
  CHECK(r.passed);
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows) {
    CHECK(row[1] == 1.0);
    CHECK(row[3] == doctest::Approx(row[2] * std::log(2.0)));
  }
  // small rates close the drift gap and the block information keeps growing
  const auto critical = uniform_chain(200, 1.0, 0.5, 1.0, 1e-3, 0.0);
  CHECK(fermion_gap(critical) < 1e-3);
  const auto rc = area_law_experiment(critical, {10, 25, 50, 100});
  CHECK(!rc.passed);
  CHECK(rc.rows[3][2] > 1.1 * rc.rows[2][2]);
}

TEST_CASE("spin area law on a thermal chain") {
  const auto l = models::davies_ising_chain(6, 1.0, 0.3, 1.0, 1.0);
  const Lattice& lat = l.lattice();
  const auto r = area_law_experiment(l, {sites(lat, {0}), sites(lat, {0, 1}), sites(lat, {0, 1, 2})});
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) CHECK(row[3] == doctest::Approx(row[2] / row[1]));
  CHECK(r.passed);
}

TEST_CASE("chi-square bound along trajectories") {
  const auto l = models::davies_ising_chain(3, 1.0, 0.3, 1.0, 1.0);
  const Matrix sigma = stationary_state(l).matrix();
  const double lambda = spectral_gap(l).gap;
  Rng rng(7);
  for (int k = 0; k < 5; ++k) {
    const auto c = chi2_trajectory_check(l, random_state(8, rng), {0.0, 0.3, 1.0, 3.0}, lambda, sigma);
    CHECK(c.violations == 0);
    CHECK(c.worst_margin <= 1e-10);
  }
  // a rate far above the gap is caught
  const auto bad = chi2_trajectory_check(l, random_pure_state(8, rng), {2.0, 4.0}, 50.0 * lambda, sigma);
  CHECK(bad.violations > 0);
}

TEST_CASE("reports are deterministic and named by model, kind and seed") {
  const auto l = models::davies_ising_chain(4, 1.0, 0.3, 1.0, 1.0);
  const Lattice& lat = l.lattice();
  ClusteringOptions opt;
  opt.velocity = 5.0;
  opt.gap = 1.0;
  opt.seed = 11;
  opt.model_id = "ising4";
  const std::vector<Region> bs{Region::single(lat, 1), Region::single(lat, 2), Region::single(lat, 3)};
  const auto r1 = clustering_experiment(l, Region::single(lat, 0), bs, opt);
  const auto r2 = clustering_experiment(l, Region::single(lat, 0), bs, opt);
  CHECK(report_json(r1) == report_json(r2));
  CHECK(report_csv(r1) == report_csv(r2));

  const auto dir = std::filesystem::temp_directory_path() / "qmix_report_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto [json_path, csv_path] = write_report(r1, dir);
  CHECK(json_path.filename() == "ising4.clustering_C.11.json");
  CHECK(csv_path.filename() == "ising4.clustering_C.11.csv");
  const auto j = nlohmann::json::parse(slurp(json_path));
  CHECK(j["kind"] == "clustering_C");
  CHECK(j["seed"] == 11);
  CHECK(j["rows"].size() == 3);
  CHECK(j["passed"] == r1.passed);
  const std::string csv = slurp(csv_path);
  CHECK(csv.rfind("D,C,T,I", 0) == 0);
  std::filesystem::remove_all(dir);

  ExperimentReport e;
  e.fitted_rate = std::numeric_limits<double>::infinity();
  CHECK(nlohmann::json::parse(report_json(e))["fitted_rate"] == "inf");
}
