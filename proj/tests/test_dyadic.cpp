#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "kpzc/dyadic.hpp"

using namespace kpzc;

namespace {

// Brute force: scan every depth-m cube of [0,1) for the one holding x.
int scan_cube_1d(double x, int m) {
  const int cells = 1 << m;
  for (int j = 0; j < cells; ++j) {
    if (j * std::ldexp(1.0, -m) <= x && x < (j + 1) * std::ldexp(1.0, -m)) return j;
  }
  return -1;
}

Point random_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(dim));
  for (auto& v : c) v = u(rng);
  return Point(c);
}

}  // namespace

TEST_CASE("address_of follows the half-open convention") {
  SUBCASE("origin sits in the first cube at every level") {
    const auto a = address_of(Point{0.0}, 3);
    CHECK(a.path() == std::vector<unsigned>{0, 0, 0});
  }
  SUBCASE("0.3 at depth 3 agrees with a scan of all eight cubes") {
    const auto a = address_of(Point{0.3}, 3);
    CHECK(scan_cube_1d(0.3, 3) == 2);
    CHECK(a.index(0) == 2);
    CHECK(a.path() == std::vector<unsigned>{0, 1, 0});
    CHECK(a.lower(0) == 0.25);
    CHECK(a.upper(0) == 0.375);
  }
  SUBCASE("boundary maps up") {
    const auto a = address_of(Point{0.5, 0.5}, 1);
    CHECK(a.path() == std::vector<unsigned>{3});
  }
  SUBCASE("coordinates outside [0,1) are domain errors") {
    CHECK_THROWS_AS(Point({1.0}), std::domain_error);
    CHECK_THROWS_AS(Point({-0.1, 0.2}), std::domain_error);
    CHECK_THROWS_AS(Point({std::nan("")}), std::domain_error);
  }
  SUBCASE("matches the scan for random points") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
      const Point p = random_point(rng, 1);
      for (int m : {0, 1, 5, 12}) CHECK(static_cast<int>(address_of(p, m).index(0)) == scan_cube_1d(p[0], m));
    }
  }
}

TEST_CASE("dyadic_ball is the longest common ancestor") {
  SUBCASE("0.3 and 0.4 share the first two bits") {
    const auto b = dyadic_ball(Point{0.3}, Point{0.4}, 60);
    CHECK(b.depth() == 2);
    CHECK(b.lower(0) == 0.25);
    CHECK(b.upper(0) == 0.5);
  }
  SUBCASE("points straddling 1/4 get a large ball") {
    const auto b = dyadic_ball(Point{0.249}, Point{0.25}, 60);
    CHECK(b.depth() == 1);
    CHECK(b.lower(0) == 0.0);
    CHECK(b.upper(0) == 0.5);
  }
  SUBCASE("coincident points hit the cap") {
    const Point x{0.123, 0.456};
    const auto b = dyadic_ball(x, x, 17);
    CHECK(b.depth() == 17);
    CHECK(b == address_of(x, 17));
  }
}

TEST_CASE("dyadic_ball properties on random triples") {
  std::mt19937_64 rng(2024);
  for (int dim : {1, 2, 3}) {
    for (int trial = 0; trial < 300; ++trial) {
      const Point x = random_point(rng, dim);
      const Point y = random_point(rng, dim);
      const Point z = random_point(rng, dim);
      const auto bxy = dyadic_ball(x, y, 40);
      CHECK(bxy == dyadic_ball(y, x, 40));
      for (int m = bxy.depth(); m <= 40; m += 7) {
        CHECK(bxy.contains(address_of(x, m)));
        CHECK(bxy.contains(address_of(y, m)));
      }
      const int dxz = dyadic_ball(x, z, 40).depth();
      const int dyz = dyadic_ball(y, z, 40).depth();
      CHECK(dxz >= std::min(bxy.depth(), dyz));
    }
  }
}

TEST_CASE("children partition their parent") {
  SUBCASE("d=1 root halves") {
    const auto c = children(DyadicAddress::root(1));
    REQUIRE(c.size() == 2);
    CHECK(c[0].lower(0) == 0.0);
    CHECK(c[0].upper(0) == 0.5);
    CHECK(c[1].lower(0) == 0.5);
    CHECK(c[1].upper(0) == 1.0);
  }
  SUBCASE("d=2 root quadrants in symbol order") {
    const auto c = children(DyadicAddress::root(2));
    REQUIRE(c.size() == 4);
    CHECK(c[1].lower(0) == 0.5);
    CHECK(c[1].lower(1) == 0.0);
    CHECK(c[2].lower(0) == 0.0);
    CHECK(c[2].lower(1) == 0.5);
  }
  SUBCASE("d=3 children are disjoint and fill the parent") {
    const auto parent = DyadicAddress::from_path(3, {5, 2});
    const auto c = children(parent);
    REQUIRE(c.size() == 8);
    std::set<std::vector<std::uint64_t>> seen;
    double total = 0.0;
    for (const auto& k : c) {
      CHECK(parent.contains(k));
      CHECK(k.ancestor(2) == parent);
      seen.insert({k.index(0), k.index(1), k.index(2)});
      total += lebesgue(k);
    }
    CHECK(seen.size() == 8);
    CHECK(total == doctest::Approx(lebesgue(parent)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(DyadicAddress::root(2).child(4), std::domain_error);
}

TEST_CASE("lebesgue measure of a cube") {
  CHECK(lebesgue(DyadicAddress::from_path(2, {1, 2, 3})) == std::ldexp(1.0, -6));
  CHECK(lebesgue(DyadicAddress::root(3)) == 1.0);
  std::vector<unsigned> ten(10, 1);
  CHECK(lebesgue(DyadicAddress::from_path(1, ten)) == std::ldexp(1.0, -10));

  // Partition: all depth-m cubes sum to one.
  for (int dim : {1, 2}) {
    for (int m : {1, 3, 5}) {
      double total = 0.0;
      const std::uint64_t per_axis = std::uint64_t{1} << m;
      std::uint64_t cubes = 1;
      for (int i = 0; i < dim; ++i) cubes *= per_axis;
      for (std::uint64_t k = 0; k < cubes; ++k) {
        std::vector<std::uint64_t> idx;
        std::uint64_t r = k;
        for (int i = 0; i < dim; ++i) {
          idx.push_back(r % per_axis);
          r /= per_axis;
        }
        total += lebesgue(DyadicAddress::from_indices(dim, m, idx));
      }
      CHECK(total == 1.0);
    }
  }
}

TEST_CASE("address text form") {
  const auto a = DyadicAddress::from_path(2, {3, 0, 1});
  CHECK(a.to_string() == "2:3:31");  // bits 11 00 01 padded to 0011 0001
  CHECK(DyadicAddress::parse(a.to_string()) == a);
  CHECK(DyadicAddress::root(1).to_string() == "1:0:");

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 4);
    const Point p = random_point(rng, dim);
    const auto b = address_of(p, static_cast<int>(rng() % 30));
    CHECK(DyadicAddress::parse(b.to_string()) == b);
  }
  CHECK_THROWS_AS(DyadicAddress::parse("2:3:3"), std::invalid_argument);
  CHECK_THROWS_AS(DyadicAddress::parse("2:3:g1"), std::invalid_argument);
  CHECK_THROWS_AS(DyadicAddress::parse("2:3:71"), std::invalid_argument);
}

TEST_CASE("center lies inside its cube") {
  const auto a = DyadicAddress::from_path(2, {1, 3});
  const Point c = a.center();
  CHECK(c[0] == 0.875);
  CHECK(c[1] == 0.375);
  CHECK(address_of(c, 2) == a);
}
