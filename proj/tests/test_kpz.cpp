#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "kpzc/errors.hpp"
#include "kpzc/kpz.hpp"
#include "oracles.hpp"

using namespace kpzc;

namespace {

std::vector<WeightModel> valid_models() {
  return {WeightModel::lognormal(0.1, 1), WeightModel::lognormal(0.5, 2), WeightModel::lognormal(1.2, 3),
          WeightModel::two_point(0.5, 1.5, 0.5, 1), WeightModel::two_point(0.25, 1.1875, 0.2, 2),
          WeightModel::unit(2)};
}

}  // namespace

TEST_CASE("phi") {
  const auto m = WeightModel::lognormal(1.0, 1);
  CHECK(phi(m, 0.0) == 0.0);
  CHECK(phi(m, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  const double quad = oracle::lognormal_expectation(1.0, [](double w) { return std::sqrt(w); });
  CHECK(phi(m, 0.5) == doctest::Approx(0.5 - std::log2(quad)).epsilon(1e-9));
  CHECK(phi(m, 0.5) == doctest::Approx(0.68034).epsilon(1e-5));
}

TEST_CASE("phi_inverse") {
  const auto m = WeightModel::lognormal(0.5, 2);
  CHECK(phi_inverse(m, 0.0) == 0.0);
  CHECK(phi_inverse(m, 1.0) == 1.0);
  const double closed = oracle::lognormal_phi_inverse(0.5, 0.5);
  CHECK(closed == doctest::Approx(0.41260).epsilon(1e-4));
  CHECK(phi_inverse(m, 0.5) == doctest::Approx(closed).epsilon(1e-9));
  for (double s2 : {0.2, 0.7, 1.3}) {
    for (double z : {0.1, 0.33, 0.9}) {
      CHECK(phi_inverse(WeightModel::lognormal(s2, 1), z) ==
            doctest::Approx(oracle::lognormal_phi_inverse(s2, z)).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(phi_inverse(m, 1.5), std::domain_error);
  CHECK_THROWS_AS(phi_inverse(m, -0.01), std::domain_error);
  CHECK_THROWS_AS(phi_inverse(WeightModel::lognormal(2.0, 2), 0.5), ContractViolation);
}

TEST_CASE("round trip and the identity") {
  for (const auto& m : valid_models()) {
    for (int i = 0; i <= 100; ++i) {
      const double z0 = i / 100.0;
      const double z = phi_inverse(m, z0);
      CHECK(z >= 0.0);
      CHECK(z <= 1.0);
      CHECK(phi(m, z) == doctest::Approx(z0).epsilon(1e-9).scale(1.0));
      CHECK(std::exp2(z0) * moment(m, z) == doctest::Approx(std::exp2(z)).epsilon(1e-9));
    }
  }
  for (double z0 : {0.0, 0.25, 0.5, 1.0}) CHECK(phi_inverse(WeightModel::unit(1), z0) == doctest::Approx(z0).epsilon(1e-10));
}

TEST_CASE("monotone coupling in sigma2") {
  for (double z0 : {0.1, 0.5, 0.9}) {
    double prev = 1.0;
    for (double s2 = 0.05; s2 < 2 * std::numbers::ln2 - 0.01; s2 += 0.05) {
      const double z = phi_inverse(WeightModel::lognormal(s2, 2), z0);
      CHECK(z < prev);
      prev = z;
    }
  }
}

TEST_CASE("moment bound check") {
  const CascadeMeasure tmpl(1, WeightModel::lognormal(0.5, 2));
  const std::vector<double> s_list{0.0, 0.5, 1.0};
  const auto rows = verify_mass_bound(tmpl, 4, s_list, 2000);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mean == 1.0);
  CHECK(rows[0].bound == 1.0);
  CHECK(rows[0].pass);
  CHECK(rows[1].bound == doctest::Approx(std::exp2(-8 * phi(tmpl.model(), 0.5))));
  CHECK(rows[1].pass);
  // Truncated at the cube's own depth the mean equals the bound.
  CHECK(std::abs(rows[1].mean - rows[1].bound) < 3 * rows[1].std_error);
  CHECK(std::abs(rows[2].mean - std::exp2(-8.0)) < 3 * rows[2].std_error);
  CHECK(rows[2].pass);

  Execution three{3};
  const auto again = verify_mass_bound(tmpl, 4, s_list, 2000, TailRule::mean_one(), three);
  CHECK(again[1].mean == rows[1].mean);

  // With an extended tail the Jensen factor makes the inequality strict.
  const auto ext = verify_mass_bound(tmpl, 3, std::vector<double>{0.5}, 2000, TailRule::extended(3));
  CHECK(ext[0].pass);
  CHECK(ext[0].mean < ext[0].bound);
}

TEST_CASE("kpz experiment") {
  KpzConfig cfg;
  cfg.estimator.n_range = {4, 8};
  cfg.seeds = 3;

  SUBCASE("full cube") {
    const auto r = kpz_experiment(WeightModel::lognormal(0.5, 2), SetOracle::full_cube(2), cfg);
    CHECK(r.zeta_predicted == 1.0);
    CHECK(std::abs(r.zeta_measured - 1.0) <= 0.02);
    CHECK(r.pass);
    CHECK(r.zeta0_analytic);
    CHECK(r.seeds == experiment_seeds(1, 3));
  }
  SUBCASE("singleton") {
    const auto r = kpz_experiment(WeightModel::lognormal(0.5, 2), SetOracle::singleton(Point{0.3, 0.7}), cfg);
    CHECK(r.zeta_predicted == 0.0);
    CHECK(std::abs(r.zeta_measured) <= 0.05);
  }
  SUBCASE("cantor") {
    cfg.estimator.n_range = {4, 12};
    cfg.seeds = 6;
    const auto r = kpz_experiment(WeightModel::lognormal(0.5, 2), SetOracle::cantor(2, {0, 3}), cfg);
    CHECK(r.zeta0 == 0.5);
    CHECK(r.zeta_predicted == doctest::Approx(0.41260).epsilon(1e-4));
    CHECK(r.discrepancy == doctest::Approx(std::abs(r.zeta_measured - r.zeta_predicted)));
    CHECK(r.pass);
    const auto line = summary_line(r);
    CHECK(line.rfind("zeta0=0.50000 predicted=0.41259 measured=", 0) == 0);
    CHECK(line.find("PASS(0.05)") != std::string::npos);
  }
  SUBCASE("unit weight reproduces zeta0") {
    const auto r = kpz_experiment(WeightModel::unit(2), SetOracle::axis_slice(2, 1, 0.5), cfg);
    CHECK(r.zeta_predicted == 0.5);
    CHECK(r.pass);
  }
  SUBCASE("invalid models are rejected") {
    CHECK_THROWS_AS(kpz_experiment(WeightModel::lognormal(2.0, 2), SetOracle::full_cube(2), cfg),
                    std::invalid_argument);
  }
  SUBCASE("seeds derive from the master seed") {
    const auto a = experiment_seeds(1, 4);
    const auto b = experiment_seeds(2, 4);
    CHECK(a.size() == 4);
    CHECK(a != b);
    CHECK(a[2] == derive_seed(1, 2));
  }
}
