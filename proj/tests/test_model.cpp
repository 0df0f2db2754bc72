#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "optdes/errors.hpp"
#include "optdes/model.hpp"
#include "support.hpp"

using namespace optdes;

TEST_CASE("regression vector prepends the intercept") {
  CHECK(regression_vector(Point::Zero(2)) == Eigen::Vector3d(1, 0, 0));
  Point x(3);
  x << 1, -1, 0.5;
  Eigen::VectorXd f(4);
  f << 1, 1, -1, 0.5;
  CHECK(regression_vector(x) == f);
  CHECK_THROWS_AS(regression_vector(Eigen::Vector2d(2, 0)), DomainError);
}

TEST_CASE("variance function values") {
  const DispersionSpec s{2, 1.0, 2.0, 0.5};
  CHECK(variance_at(s, Eigen::Vector2d(0, 0)) == doctest::Approx(1.0));
  CHECK(variance_at(s, Eigen::Vector2d(1, 1)) == doctest::Approx(6.0));
  CHECK(variance_at(s, Eigen::Vector2d(1, -1)) == doctest::Approx(4.0));
}

TEST_CASE("variance agrees with the dense quadratic form and is group invariant") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + trial % 5;
    const auto s = testing::random_spec(k, rng);
    const Point x = testing::random_point(k, rng);
    const double v = variance_at(s, x);
    CHECK(v == doctest::Approx(testing::variance_direct(s, x)).epsilon(1e-12));
    CHECK(v > 0.0);
    if (s.d2 >= 0.0) CHECK(v >= s.d0 * (1.0 - 1e-12));
    const auto g = testing::random_group_element(k, rng);
    CHECK(variance_at(s, g(x)) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("dense dispersion matrix layout") {
  const Eigen::MatrixXd d = dispersion_matrix({3, 2.0, 1.0, 0.25});
  CHECK(d(0, 0) == 2.0);
  CHECK(d(0, 2) == 0.0);
  CHECK(d(1, 1) == 1.0);
  CHECK(d(1, 3) == 0.25);
}

TEST_CASE("sym_inverse examples") {
  const SymPair id = sym_inverse({1.0, 0.0, 5});
  CHECK(id.a1 == doctest::Approx(1.0));
  CHECK(id.a2 == doctest::Approx(0.0));

  // [[2,1],[1,2]]^-1 = [[2,-1],[-1,2]] / 3 by the 2x2 adjugate.
  const SymPair inv = sym_inverse({2.0, 1.0, 2});
  CHECK(inv.a1 == doctest::Approx(2.0 / 3.0));
  CHECK(inv.a2 == doctest::Approx(-1.0 / 3.0));

  CHECK_THROWS_AS(sym_inverse({1.0, 1.0, 3}), SingularityError);
  CHECK_THROWS_AS(sym_inverse({1.0, -0.5, 3}), SingularityError);
}

TEST_CASE("sym_inverse matches dense inversion and is an involution") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + trial % 7;
    const double a1 = testing::uniform(rng, 0.5, 3.0);
    const double a2 = testing::uniform(rng, -0.9 * a1 / (k - 1), 0.9 * a1);
    const SymPair m{a1, a2, k};
    const SymPair inv = sym_inverse(m);
    const Eigen::MatrixXd dense = m.dense().inverse();
    CHECK((inv.dense() - dense).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((m.dense() * inv.dense() - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-12);
    const SymPair back = sym_inverse(inv);
    CHECK(std::abs(back.a1 - a1) < 1e-12 * std::max(1.0, a1));
    CHECK(std::abs(back.a2 - a2) < 1e-12 * std::max(1.0, a1));
  }
}

TEST_CASE("cone membership") {
  CHECK(cone_contains({3, 1.0, 1.0, -0.5}));
  CHECK_FALSE(cone_contains({2, 1.0, 1.0, 1.5}));
  CHECK_FALSE(cone_contains({2, 0.0, 1.0, 0.0}));
  CHECK(cone_contains({2, 1.0, 1.0, 1.0}));
  CHECK_FALSE(is_positive_definite({2, 1.0, 1.0, 1.0}));
  CHECK(is_positive_definite({2, 1.0, 1.0, 0.999}));
  CHECK(cone_contains({2, 1.0, 1.0, 1.05}, 0.1));
  CHECK_THROWS_AS(require_in_cone({2, 1.0, 1.0, 1.5}), DomainError);
  CHECK_THROWS_AS(require_in_cone({1, 1.0, 1.0, 0.0}), DomainError);
}

TEST_CASE("verdict tolerance can be overridden from the environment") {
  unsetenv("OPTDES_TOL");
  CHECK(default_kw_tolerance() == 1e-7);
  setenv("OPTDES_TOL", "1e-5", 1);
  CHECK(default_kw_tolerance() == 1e-5);
  setenv("OPTDES_TOL", "garbage", 1);
  CHECK(default_kw_tolerance() == 1e-7);
  unsetenv("OPTDES_TOL");
}
