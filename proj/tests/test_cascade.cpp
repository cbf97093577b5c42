#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "kpzc/cascade.hpp"
#include "kpzc/errors.hpp"
#include "oracles.hpp"

using namespace kpzc;

namespace {

struct Stats {
  double mean = 0.0;
  double se = 0.0;
};

Stats stats(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / (n - 1) / n)};
}

const WeightModel kTwoPoint = WeightModel::two_point(0.5, 1.5, 0.5, 1);

}  // namespace

TEST_CASE("node weights are pure functions of seed and address") {
  const CascadeMeasure c(7, WeightModel::lognormal(0.5, 2));
  const auto a = DyadicAddress::from_path(2, {3, 1, 2});
  CHECK(node_weight(c, a) == node_weight(c, a));
  CHECK(node_weight(CascadeMeasure(7, WeightModel::lognormal(0.5, 2)), a) == node_weight(c, a));
  CHECK(std::exp2(log2_node_weight(c, a)) == doctest::Approx(node_weight(c, a)).epsilon(1e-14));
  CHECK_THROWS_AS(node_weight(c, DyadicAddress::root(2)), ContractViolation);
  CHECK(c.hash_version() == kHashVersion);
}

TEST_CASE("weights at seed and seed+1 are uncorrelated") {
  const auto model = WeightModel::lognormal(0.5, 1);
  const CascadeMeasure c0(100, model);
  const CascadeMeasure c1(101, model);
  std::vector<double> x;
  std::vector<double> y;
  for (std::uint64_t j = 0; j < 10000; ++j) {
    const std::uint64_t idx[1] = {j};
    const auto a = DyadicAddress::from_indices(1, 14, idx);
    x.push_back(node_weight(c0, a));
    y.push_back(node_weight(c1, a));
  }
  const auto sx = stats(x);
  const auto sy = stats(y);
  double cov = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - sx.mean) * (y[i] - sy.mean);
    vx += (x[i] - sx.mean) * (x[i] - sx.mean);
    vy += (y[i] - sy.mean) * (y[i] - sy.mean);
  }
  CHECK(std::abs(cov / std::sqrt(vx * vy)) < 0.05);

  // Neighbouring addresses under one seed.
  double cov2 = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) cov2 += (x[i] - sx.mean) * (x[i + 1] - sx.mean);
  CHECK(std::abs(cov2 / vx) < 0.05);
}

TEST_CASE("two-point weights stay on the support") {
  for (auto layout : {CubeWeighting::product_per_axis, CubeWeighting::single_draw}) {
    const CascadeMeasure c(3, kTwoPoint, layout);
    int lows = 0;
    for (unsigned j = 0; j < 512; ++j) {
      const std::uint64_t idx[1] = {j};
      const double w = node_weight(c, DyadicAddress::from_indices(1, 9, idx));
      CHECK((w == 0.5 || w == 1.5));
      lows += w == 0.5;
    }
    CHECK(lows > 200);
    CHECK(lows < 312);
  }
}

TEST_CASE("cube weighting layouts") {
  CHECK(parse_cube_weighting(to_string(CubeWeighting::single_draw)) == CubeWeighting::single_draw);
  CHECK(parse_cube_weighting("product_per_axis") == CubeWeighting::product_per_axis);
  CHECK_THROWS_AS(parse_cube_weighting("per_cube"), std::invalid_argument);
  // The two layouts coincide in one dimension.
  const auto model = WeightModel::lognormal(0.5, 1);
  const CascadeMeasure a(9, model, CubeWeighting::product_per_axis);
  const CascadeMeasure b(9, model, CubeWeighting::single_draw);
  const auto addr = DyadicAddress::from_path(1, {1, 0, 1});
  CHECK(node_weight(a, addr) == node_weight(b, addr));
}

TEST_CASE("tail rule text form") {
  CHECK(to_string(TailRule::mean_one()) == "mean_one");
  CHECK(to_string(TailRule::extended(3)) == "extended(3)");
  CHECK(parse_tail_rule("extended(3)") == TailRule::extended(3));
  CHECK(parse_tail_rule("mean_one") == TailRule::mean_one());
  CHECK_THROWS_AS(parse_tail_rule("extended(-1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_tail_rule("tail"), std::invalid_argument);
}

TEST_CASE("mass examples") {
  SUBCASE("unit weight reduces to Lebesgue") {
    const CascadeMeasure c(1, WeightModel::unit(2));
    const auto a = DyadicAddress::from_path(2, {2, 1});
    for (int n : {2, 3, 6}) CHECK(mass(c, a, n).value() == lebesgue(a));
    CHECK(mass(c, a, 4, TailRule::extended(2)).value() == lebesgue(a));
  }
  SUBCASE("depth-2 cube at n = 2 is the bare product") {
    const CascadeMeasure c(5, WeightModel::lognormal(0.5, 1));
    const auto a = DyadicAddress::from_path(1, {1, 0});
    const double expected = 0.25 * node_weight(c, a.ancestor(1)) * node_weight(c, a);
    const auto m = mass(c, a, 2);
    CHECK(m.value() == doctest::Approx(expected).epsilon(1e-14));
    CHECK(m.trunc_depth == 2);
    CHECK(m.address == a);
  }
  SUBCASE("explicit subtree sum") {
    const CascadeMeasure c(5, kTwoPoint);
    const auto a = DyadicAddress::from_path(1, {1});
    double sum = 0.0;
    for (unsigned x : {0U, 1U}) {
      for (unsigned y : {0U, 1U}) {
        const auto leaf = DyadicAddress::from_path(1, {1, x, y});
        sum += node_weight(c, a) * node_weight(c, leaf.ancestor(2)) * node_weight(c, leaf);
      }
    }
    CHECK(mass(c, a, 3).value() == doctest::Approx(sum / 8.0).epsilon(1e-14));
    CHECK(mass(c, a, 1, TailRule::extended(2)).value() == doctest::Approx(sum / 8.0).epsilon(1e-14));
  }
  SUBCASE("contract violations") {
    const CascadeMeasure c(5, kTwoPoint);
    CHECK_THROWS_AS(mass(c, DyadicAddress::from_path(1, {1, 1}), 1), ContractViolation);
    CHECK_THROWS_AS(slab_mass(c, 1, 5, 4), ContractViolation);
  }
  CHECK(total_mass(CascadeMeasure(11, WeightModel::lognormal(0.5, 2)), 0) == 1.0);
}

TEST_CASE("additivity over children") {
  for (int d : {1, 2, 3}) {
    const CascadeMeasure c(42, WeightModel::lognormal(0.5, d));
    std::vector<unsigned> path(2, 1);
    const auto a = DyadicAddress::from_path(d, path);
    const int n = d == 3 ? 4 : 7;
    double sum = 0.0;
    for (const auto& ch : children(a)) sum += mass(c, ch, n).value();
    CHECK(mass(c, a, n).value() == doctest::Approx(sum).epsilon(1e-10));
    CHECK(total_mass(c, n) == doctest::Approx(mass(c, DyadicAddress::root(d), n).value()).epsilon(1e-12));
  }
}

TEST_CASE("martingale: mean mass equals Lebesgue measure") {
  const auto model = WeightModel::lognormal(0.5, 2);
  const auto a = DyadicAddress::from_path(2, {1});
  for (int n : {1, 4}) {
    std::vector<double> xs;
    for (std::uint64_t s = 0; s < 2000; ++s) xs.push_back(mass(CascadeMeasure(s, model), a, n).value());
    const auto st = stats(xs);
    CHECK(std::abs(st.mean - 0.25) < 3 * st.se);
  }
  std::vector<double> totals;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    totals.push_back(total_mass(CascadeMeasure(derive_seed(9, s), WeightModel::lognormal(0.5, 1)), 10));
  }
  const auto st = stats(totals);
  CHECK(std::abs(st.mean - 1.0) < 3 * st.se);
}

TEST_CASE("second moment of the total mass") {
  // The enumeration oracle and the recursion agree exactly for small n.
  for (int n = 1; n <= 3; ++n) {
    CHECK(oracle::two_point_total_mass_moment(0.5, 1.5, 0.5, n, 2) ==
          doctest::Approx(oracle::second_moment_recursion(1.25, 1, n)).epsilon(1e-12));
    CHECK(oracle::two_point_total_mass_moment(0.5, 1.5, 0.5, n, 1) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(oracle::second_moment_recursion(1.25, 1, 200) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  std::vector<double> sq;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    const double l = total_mass(CascadeMeasure(derive_seed(77, s), kTwoPoint), 8);
    sq.push_back(l * l);
  }
  const auto st = stats(sq);
  CHECK(std::abs(st.mean - oracle::second_moment_recursion(1.25, 1, 8)) < 3 * st.se);
}

TEST_CASE("moment scaling at the truncation depth") {
  const double s = 0.5;
  const int n = 3;
  for (auto layout : {CubeWeighting::product_per_axis, CubeWeighting::single_draw}) {
    for (const auto& model : {WeightModel::lognormal(0.5, 2), WeightModel::two_point(0.5, 1.5, 0.5, 2)}) {
      std::vector<double> xs;
      const auto a = DyadicAddress::from_path(2, {0, 3, 1});
      for (std::uint64_t t = 0; t < 4000; ++t) {
        xs.push_back(std::pow(mass(CascadeMeasure(derive_seed(5, t), model, layout), a, n).value(), s));
      }
      const int factors = layout == CubeWeighting::product_per_axis ? n * 2 : n;
      const double expected = std::exp2(-n * 2 * s) * std::pow(moment(model, s), factors);
      const auto st = stats(xs);
      CHECK(std::abs(st.mean - expected) < 3 * st.se);
    }
  }
}

TEST_CASE("Jensen bound on truncated total mass") {
  std::vector<double> ls;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    ls.push_back(total_mass(CascadeMeasure(derive_seed(3, t), WeightModel::lognormal(0.5, 1)), 8));
  }
  for (double s : {0.25, 0.5, 0.75}) {
    std::vector<double> xs;
    for (double l : ls) xs.push_back(std::pow(l, s));
    const auto st = stats(xs);
    CHECK(st.mean <= 1.0 + 3 * st.se);
  }
}

TEST_CASE("slab masses") {
  SUBCASE("Lebesgue slabs") {
    const CascadeMeasure c(1, WeightModel::unit(2));
    CHECK(slab_mass(c, 1, 3, 3) == 0.25);
    CHECK(slab_mass(c, 2, 3, 7) == 0.25);
    for (int n : {2, 5, 9}) CHECK(slab_mass(c, 1, n, n) == std::ldexp(1.0, -n + 1));
  }
  SUBCASE("batched and single queries agree") {
    const CascadeMeasure c(8, WeightModel::lognormal(0.5, 2));
    const std::vector<int> ks{1, 2, 3, 4, 5};
    const auto batch = slab_masses(c, 2, ks, 7);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      CHECK(batch[i] == doctest::Approx(slab_mass(c, 2, ks[i], 7)).epsilon(1e-12));
    }
    // Direct sum over the depth-k cubes meeting the slab, k = 2.
    double direct = 0.0;
    for (std::uint64_t i = 0; i < 4; ++i) {
      for (std::uint64_t j : {1, 2}) {
        const std::uint64_t idx[2] = {i, j};
        direct += mass(c, DyadicAddress::from_indices(2, 2, idx), 7).value();
      }
    }
    CHECK(batch[1] == doctest::Approx(direct).epsilon(1e-12));
  }
  SUBCASE("mean slab mass decreases in k") {
    const auto model = WeightModel::lognormal(0.5, 2);
    const std::vector<int> ks{1, 2, 3, 4, 5, 6};
    std::vector<double> means(ks.size(), 0.0);
    for (std::uint64_t t = 0; t < 40; ++t) {
      const auto v = slab_masses(CascadeMeasure(derive_seed(2, t), model), 1, ks, 7);
      for (std::size_t i = 0; i < ks.size(); ++i) means[i] += v[i];
    }
    for (std::size_t i = 1; i < ks.size(); ++i) CHECK(means[i] < means[i - 1]);
  }
}
