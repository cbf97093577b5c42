#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "kpzc/sets.hpp"

using namespace kpzc;

namespace {

std::uint64_t count_nondisjoint(const SetOracle& set, const DyadicAddress& a, int n) {
  if (set.classify(a) == CubeRelation::disjoint) return 0;
  if (a.depth() == n) return 1;
  std::uint64_t total = 0;
  for (const auto& c : children(a)) total += count_nondisjoint(set, c, n);
  return total;
}

void check_refinement(const SetOracle& set, const DyadicAddress& a, int depth_left) {
  const CubeRelation r = set.classify(a);
  for (const auto& c : children(a)) {
    const CubeRelation rc = set.classify(c);
    CHECK(set.refine(c, r) == rc);
    if (r != CubeRelation::intersects) CHECK(rc == r);
    if (depth_left > 1 && rc == CubeRelation::intersects) check_refinement(set, c, depth_left - 1);
  }
}

}  // namespace

TEST_CASE("classify examples") {
  const auto full = SetOracle::full_cube(2);
  CHECK(full.classify(DyadicAddress::from_path(2, {1, 2})) == CubeRelation::contained);
  CHECK(full.classify(DyadicAddress::root(2)) == CubeRelation::contained);

  const auto cantor = SetOracle::cantor(2, {0, 3});
  CHECK(cantor.classify(DyadicAddress::root(2).child(1)) == CubeRelation::disjoint);
  CHECK(cantor.classify(DyadicAddress::root(2).child(3)) == CubeRelation::intersects);

  const auto slice = SetOracle::axis_slice(2, 1, 0.5);
  CHECK(slice.classify(DyadicAddress::from_path(2, {0})) == CubeRelation::disjoint);
  const std::uint64_t idx[2] = {2, 0};
  const auto right = DyadicAddress::from_indices(2, 2, idx);  // [0.5,0.75) x [0,0.25)
  CHECK(right.lower(0) == 0.5);
  CHECK(slice.classify(right) == CubeRelation::intersects);
  CHECK(slice.classify(DyadicAddress::from_path(2, {1})) == CubeRelation::intersects);

  const auto single = SetOracle::singleton(Point{0.3, 0.7});
  CHECK(single.classify(address_of(Point{0.3, 0.7}, 20)) == CubeRelation::intersects);
  CHECK(single.classify(address_of(Point{0.31, 0.7}, 20)) == CubeRelation::disjoint);

  CHECK_THROWS_AS(full.classify(DyadicAddress::root(1)), std::invalid_argument);
}

TEST_CASE("classify of the root is never disjoint") {
  for (const auto& set : {SetOracle::full_cube(3), SetOracle::cantor(1, {1}),
                          SetOracle::axis_slice(3, 2, 0.375), SetOracle::singleton(Point{0.9})}) {
    CHECK(set.classify(DyadicAddress::root(set.dim())) != CubeRelation::disjoint);
  }
}

TEST_CASE("analytic dimension") {
  CHECK(SetOracle::full_cube(2).analytic_zeta0() == 1.0);
  CHECK(SetOracle::cantor(2, {0, 3}).analytic_zeta0() == 0.5);
  CHECK(*SetOracle::cantor(2, {0, 1, 3}).analytic_zeta0() == doctest::Approx(std::log2(3.0) / 2));
  CHECK(SetOracle::axis_slice(2, 1, 0.5).analytic_zeta0() == 0.5);
  CHECK(*SetOracle::axis_slice(3, 1, 0.5).analytic_zeta0() == doctest::Approx(2.0 / 3.0));
  CHECK(SetOracle::singleton(Point{0.2, 0.2}).analytic_zeta0() == 0.0);
  const auto u = SetOracle::finite_union(
      {SetOracle::singleton(Point{0.1, 0.1}), SetOracle::cantor(2, {0, 3}), SetOracle::axis_slice(2, 2, 0.25)});
  CHECK(u.analytic_zeta0() == 0.5);
}

TEST_CASE("cover counts of Cantor sets are exact powers") {
  for (int k = 1; k <= 4; ++k) {
    std::vector<unsigned> keep;
    for (int i = 0; i < k; ++i) keep.push_back(static_cast<unsigned>(i * 3 % 4));
    const auto set = SetOracle::cantor(2, keep);
    for (int n = 0; n <= (k == 4 ? 6 : 10); ++n) {
      CHECK(count_nondisjoint(set, DyadicAddress::root(2), n) ==
            static_cast<std::uint64_t>(std::llround(std::pow(k, n))));
    }
  }
}

TEST_CASE("refinement consistency") {
  check_refinement(SetOracle::cantor(2, {0, 3}), DyadicAddress::root(2), 5);
  check_refinement(SetOracle::axis_slice(2, 2, 0.375), DyadicAddress::root(2), 6);
  check_refinement(SetOracle::singleton(Point{0.3, 0.6}), DyadicAddress::root(2), 6);
  check_refinement(SetOracle::full_cube(3), DyadicAddress::root(3), 2);
  check_refinement(SetOracle::finite_union({SetOracle::cantor(2, {1, 2}), SetOracle::axis_slice(2, 1, 0.5)}),
                   DyadicAddress::root(2), 5);
}

TEST_CASE("finite union is the pointwise join") {
  const std::vector<SetOracle> members{SetOracle::cantor(2, {0, 3}), SetOracle::axis_slice(2, 1, 0.75),
                                       SetOracle::singleton(Point{0.6, 0.1})};
  const auto u = SetOracle::finite_union(members);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 500; ++t) {
    const int depth = 1 + static_cast<int>(rng() % 6);
    const std::uint64_t idx[2] = {rng() % (1U << depth), rng() % (1U << depth)};
    const auto a = DyadicAddress::from_indices(2, depth, idx);
    bool any_contained = false;
    bool all_disjoint = true;
    for (const auto& m : members) {
      any_contained |= m.classify(a) == CubeRelation::contained;
      all_disjoint &= m.classify(a) == CubeRelation::disjoint;
    }
    const auto r = u.classify(a);
    CHECK((r == CubeRelation::contained) == any_contained);
    CHECK((r == CubeRelation::disjoint) == all_disjoint);
  }
  // Containment through a full member.
  const auto with_full = SetOracle::finite_union({SetOracle::full_cube(2), SetOracle::singleton(Point{0.1, 0.1})});
  CHECK(with_full.classify(DyadicAddress::from_path(2, {2})) == CubeRelation::contained);
}

TEST_CASE("set grammar") {
  const auto c = parse_set("cantor(keep=[0,3])", 2);
  CHECK(c.classify(DyadicAddress::root(2).child(1)) == CubeRelation::disjoint);
  CHECK(parse_set("fullcube", 3).dim() == 3);
  CHECK(parse_set("slice(axis=2,coord=0.25)", 2).analytic_zeta0() == 0.5);
  CHECK(parse_set("singleton(0.3,0.7)", 2).analytic_zeta0() == 0.0);
  const auto u = parse_set("union(singleton(0.3,0.7), cantor(keep=[1,2]))", 2);
  CHECK(u.analytic_zeta0() == 0.5);
  for (const auto& text : {"fullcube", "cantor(keep=[0,3])", "slice(axis=1,coord=0.5)", "singleton(0.3,0.7)",
                           "union(singleton(0.3,0.7),slice(axis=2,coord=0.125))"}) {
    CHECK(parse_set(text, 2).to_string() == text);
    CHECK(parse_set(parse_set(text, 2).to_string(), 2).to_string() == parse_set(text, 2).to_string());
  }
  CHECK_THROWS_AS(parse_set("slice(axis=3,coord=0.5)", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_set("slice(axis=1,coord=1e-30)", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_set("cantor(keep=[4])", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_set("singleton(0.3)", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_set("carpet", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_set("union()", 2), std::invalid_argument);
}

TEST_CASE("slice coordinates must resolve within the depth limit") {
  CHECK_NOTHROW(SetOracle::axis_slice(2, 1, std::ldexp(1.0, -kMaxDepth)));
  CHECK_THROWS_AS(SetOracle::axis_slice(2, 1, std::ldexp(1.0, -kMaxDepth - 1)), std::invalid_argument);
  CHECK_THROWS_AS(SetOracle::axis_slice(2, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SetOracle::axis_slice(2, 0, 0.5), std::invalid_argument);
}
