#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "optdes/designs.hpp"
#include "optdes/errors.hpp"
#include "support.hpp"

using namespace optdes;

namespace {

int negatives(const Point& x) {
  int n = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) n += x[i] < 0.0;
  return n;
}

}  // namespace

TEST_CASE("orbit sizes") {
  CHECK(orbit_size(3, 1) == 6);
  CHECK(orbit_size(4, 2) == 6);
  CHECK(orbit_size(2, 0) == 2);
  CHECK_THROWS_AS(orbit_size(3, 2), DomainError);
  for (int k = 2; k <= 12; ++k) {
    std::uint64_t total = 0;
    for (int ell = 0; ell <= max_orbit_index(k); ++ell) total += orbit_size(k, ell);
    CHECK(total == (std::uint64_t{1} << k));
  }
}

TEST_CASE("orbit expansion examples") {
  const auto o = expand_orbit(2, 1, 1.0);
  REQUIRE(o.size() == 2);
  CHECK(o[0] == Eigen::Vector2d(-1, 1));
  CHECK(o[1] == Eigen::Vector2d(1, -1));

  const auto d = expand_orbit(3, 0, 0.5);
  REQUIRE(d.size() == 2);
  CHECK(d[0] == Eigen::Vector3d(0.5, 0.5, 0.5));
  CHECK(d[1] == Eigen::Vector3d(-0.5, -0.5, -0.5));

  const auto h = expand_orbit(4, 2, 1.0);
  CHECK(h.size() == 6);
  std::set<std::vector<double>> seen;
  for (const auto& x : h) {
    CHECK(negatives(x) == 2);
    seen.insert({x.data(), x.data() + x.size()});
  }
  CHECK(seen.size() == 6);

  CHECK_THROWS_AS(expand_orbit(2, 0, 0.0), DomainError);
  CHECK_THROWS_AS(expand_orbit(2, 0, 1.5), DomainError);
}

TEST_CASE("orbits are sign closed, sized and share one variance") {
  testing::Rng rng(3);
  for (int k = 2; k <= 7; ++k) {
    const auto s = testing::random_spec(k, rng);
    for (int ell = 0; ell <= max_orbit_index(k); ++ell) {
      const double t = testing::uniform(rng, 0.1, 1.0);
      const auto pts = expand_orbit(k, ell, t);
      CHECK(pts.size() == orbit_size(k, ell));
      std::set<std::vector<double>> all;
      for (const auto& x : pts) all.insert({x.data(), x.data() + x.size()});
      for (const auto& x : pts) {
        const Point neg = -x;
        CHECK(all.count({neg.data(), neg.data() + neg.size()}) == 1);
        const int n = negatives(x);
        CHECK((n == ell || n == k - ell));
        CHECK(x.cwiseAbs().maxCoeff() == doctest::Approx(t));
        CHECK(x.cwiseAbs().minCoeff() == doctest::Approx(t));
        CHECK(testing::variance_direct(s, x) == doctest::Approx(testing::variance_direct(s, pts[0])).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("to_discrete spreads orbit weight uniformly") {
  const auto dd = to_discrete({2, {{0, 1.0, 0.5}, {1, 1.0, 0.5}}});
  REQUIRE(dd.points.size() == 4);
  for (const auto& p : dd.points) CHECK(p.w == doctest::Approx(0.25));

  const auto six = to_discrete({3, {{1, 1.0, 1.0}}});
  REQUIRE(six.points.size() == 6);
  for (const auto& p : six.points) CHECK(p.w == doctest::Approx(1.0 / 6.0));

  CHECK_THROWS_AS(to_discrete({2, {}}), DomainError);

  const auto dropped = to_discrete({2, {{0, 0.5, 1.0}, {1, 0.7, 0.0}}});
  CHECK(dropped.points.size() == 2);
}

TEST_CASE("rhombic design validation") {
  CHECK_THROWS_AS((RhombicDesign{2, {{0, 1.0, 0.5}, {0, 0.5, 0.5}}}.validate()), DomainError);
  CHECK_THROWS_AS((RhombicDesign{2, {{0, 0.0, 1.0}}}.validate()), DomainError);
  CHECK_THROWS_AS((RhombicDesign{2, {{2, 1.0, 1.0}}}.validate()), DomainError);
  CHECK_THROWS_AS((RhombicDesign{2, {{0, 1.0, -0.1}, {1, 1.0, 1.1}}}.validate()), DomainError);
  CHECK_NOTHROW((RhombicDesign{2, {{0, 1.0, 0.3}, {1, 0.2, 0.7}}}.validate()));
}

TEST_CASE("discrete design validation") {
  CHECK_THROWS_AS((DiscreteDesign{2, {{Eigen::Vector2d(0, 0), 0.5}, {Eigen::Vector2d(0, 0), 0.5}}}.validate()),
                  DomainError);
  CHECK_THROWS_AS((DiscreteDesign{2, {{Eigen::Vector2d(0, 1.5), 1.0}}}.validate()), DomainError);
  CHECK_THROWS_AS((DiscreteDesign{2, {{Eigen::Vector3d(0, 0, 0), 1.0}}}.validate()), DomainError);
  CHECK_THROWS_AS((DiscreteDesign{2, {{Eigen::Vector2d(0, 0), 0.9}}}.validate()), DomainError);
}

TEST_CASE("invariance under permutations and the global sign change") {
  testing::Rng rng(8);
  for (int k = 2; k <= 6; ++k) CHECK(is_invariant(to_discrete(testing::random_rhombic(k, rng))));
  CHECK_FALSE(is_invariant({2, {{Eigen::Vector2d(1, 1), 1.0}}}));
  CHECK_FALSE(is_invariant({2, {{Eigen::Vector2d(1, 0), 0.5}, {Eigen::Vector2d(0, 1), 0.5}}}));
  // Sign closed but not permutation closed.
  CHECK_FALSE(is_invariant({2, {{Eigen::Vector2d(1, 0), 0.5}, {Eigen::Vector2d(-1, 0), 0.5}}}));
  // Right support, unequal weights inside an orbit.
  CHECK_FALSE(is_invariant({2, {{Eigen::Vector2d(1, 1), 0.6}, {Eigen::Vector2d(-1, -1), 0.4}}}));
}

TEST_CASE("grouping the expansion recovers the orbits") {
  testing::Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + trial % 5;
    const auto rd = testing::random_rhombic(k, rng);
    const auto dd = to_discrete(rd);
    double mass = 0.0;
    for (const auto& p : dd.points) mass += p.w;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-15));
    const auto back = group_by_orbit(dd);
    REQUIRE(back.orbits.size() == rd.orbits.size());
    for (std::size_t i = 0; i < rd.orbits.size(); ++i) {
      CHECK(back.orbits[i].ell == rd.orbits[i].ell);
      CHECK(std::abs(back.orbits[i].level - rd.orbits[i].level) < 1e-12);
      CHECK(std::abs(back.orbits[i].weight - rd.orbits[i].weight) < 1e-12);
    }
  }
  CHECK_THROWS_AS(group_by_orbit({2, {{Eigen::Vector2d(1, 0), 0.5}, {Eigen::Vector2d(-1, 0), 0.5}}}), DomainError);
}
