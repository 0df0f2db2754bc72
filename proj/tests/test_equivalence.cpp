#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "optdes/equivalence.hpp"
#include "optdes/solvers.hpp"
#include "support.hpp"

using namespace optdes;

namespace {

double psi_direct(const GammaBlocks& gb, const Point& x) {
  Eigen::VectorXd f(x.size() + 1);
  f[0] = 1.0;
  f.tail(x.size()) = x;
  return f.dot(gb.dense() * f);
}

// Uniform grid scan followed by exact coordinate descent, written out independently.
double grid_then_descent(const GammaBlocks& gb, int k, int n) {
  const Eigen::MatrixXd q = gb.dense();
  std::vector<int> idx(k, 0);
  double best = INFINITY;
  Point arg(k);
  for (;;) {
    Point x(k);
    for (int i = 0; i < k; ++i) x[i] = -1.0 + 2.0 * idx[i] / (n - 1);
    const double v = psi_direct(gb, x);
    if (v < best) {
      best = v;
      arg = x;
    }
    int j = 0;
    while (j < k && ++idx[j] == n) idx[j++] = 0;
    if (j == k) break;
  }
  for (int pass = 0; pass < 200; ++pass)
    for (int i = 0; i < k; ++i) {
      // psi as a quadratic in x_i: q_ii x^2 + 2 b x + const.
      double b = q(0, i + 1);
      for (int j = 0; j < k; ++j)
        if (j != i) b += q(j + 1, i + 1) * arg[j];
      const double a = q(i + 1, i + 1);
      double c = a > 0.0 ? std::clamp(-b / a, -1.0, 1.0) : (b > 0.0 ? -1.0 : 1.0);
      if (a <= 0.0) {
        Point lo = arg, hi = arg;
        lo[i] = -1.0;
        hi[i] = 1.0;
        c = psi_direct(gb, lo) <= psi_direct(gb, hi) ? -1.0 : 1.0;
      }
      arg[i] = c;
    }
  return std::min(best, psi_direct(gb, arg));
}

}  // namespace

TEST_CASE("psi examples") {
  testing::Rng rng(1);
  const Point x = testing::random_point(3, rng);
  CHECK(psi({3, 0.0, 0.0, 0.0}, x) == 0.0);
  const double g0 = 1.7;
  for (int k = 2; k <= 5; ++k) {
    const Point y = testing::random_point(k, rng);
    CHECK(psi({k, g0, -g0 / k, 0.0}, y) == doctest::Approx(g0 * (1.0 - y.squaredNorm() / k)));
  }
  const GammaBlocks gb{3, 0.3, -0.2, 0.45};
  CHECK(psi(gb, Eigen::Vector3d(-1, 1, 1)) == doctest::Approx(gb.g0 + 3 * gb.g1 - 2 * gb.g2));
  for (int trial = 0; trial < 100; ++trial) {
    const GammaBlocks r{4, testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2)};
    const Point z = testing::random_point(4, rng);
    CHECK(psi(r, z) == doctest::Approx(psi_direct(r, z)).epsilon(1e-12));
    CHECK(psi_dense(r.dense(), z) == doctest::Approx(psi_direct(r, z)).epsilon(1e-12));
  }
}

TEST_CASE("box minimum examples") {
  for (int k = 2; k <= 6; ++k) {
    const BoxMinimum v = min_psi_box({k, 2.0, -2.0 / k, 0.0}, k);
    CHECK(std::abs(v.value) < 1e-14);
    CHECK(v.argmin.cwiseAbs().minCoeff() == doctest::Approx(1.0));
  }
  const BoxMinimum o = min_psi_box({3, 1.0, 1.0, 0.0}, 3);
  CHECK(o.value == doctest::Approx(1.0));
  CHECK(o.argmin.norm() == doctest::Approx(0.0));

  // psi = 2 x1 x2, minimised at the anti-diagonal vertices.
  const BoxMinimum a = min_psi_box({2, 0.0, 0.0, 1.0}, 2);
  CHECK(a.value == doctest::Approx(-2.0));
  CHECK(std::abs(a.argmin[0] * a.argmin[1] + 1.0) < 1e-14);
  CHECK(a.argmin == Eigen::Vector2d(-1, 1));  // lexicographic tie-break
  CHECK(grid_then_descent({2, 0.0, 0.0, 1.0}, 2, 101) == doctest::Approx(-2.0));
}

TEST_CASE("box minimum against grid scans and random points") {
  testing::Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 3;
    const GammaBlocks gb{k, testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2)};
    const BoxMinimum m = min_psi_box(gb, k);
    CHECK(psi_direct(gb, m.argmin) == doctest::Approx(m.value).epsilon(1e-12));
    CHECK(m.argmin.cwiseAbs().maxCoeff() <= 1.0);
    const double ref = grid_then_descent(gb, k, k == 2 ? 101 : (k == 3 ? 31 : 13));
    CHECK(m.value <= ref + 1e-9);
    CHECK(m.value >= ref - 1e-9);
    for (int i = 0; i < 100; ++i) CHECK(m.value <= psi(gb, testing::random_point(k, rng)) + 1e-12);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 5 + trial % 4;
    const GammaBlocks gb{k, testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2)};
    const BoxMinimum m = min_psi_box(gb, k);
    for (int i = 0; i < 10000; ++i) CHECK(m.value <= psi(gb, testing::random_point(k, rng)) + 1e-12);
  }
}

TEST_CASE("dense minimiser agrees with the block minimiser on invariant gammas") {
  testing::Rng rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + trial % 3;
    const GammaBlocks gb{k, testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2)};
    CHECK(min_psi_box_dense(gb.dense(), k).value == doctest::Approx(min_psi_box(gb, k).value).epsilon(1e-9));
  }
}

TEST_CASE("verdict classification") {
  const std::vector<PsiAtPoint> flat{{Eigen::Vector2d(1, 1), 1e-9}};
  const std::vector<PsiAtPoint> slack{{Eigen::Vector2d(1, 1), 5e-7}};
  CHECK(classify(0.0, flat, 1e-7) == Verdict::optimal);
  CHECK(classify(-5e-8, flat, 1e-7) == Verdict::optimal);
  CHECK(classify(-5e-7, flat, 1e-7) == Verdict::borderline);
  CHECK(classify(-1e-3, flat, 1e-7) == Verdict::not_optimal);
  CHECK(classify(0.0, slack, 1e-7) == Verdict::borderline);
}

TEST_CASE("kw_verify examples") {
  const DispersionSpec s{2, 0.5, 2.0, 1.0};
  const RhombicDesign opt{2, {{0, std::sqrt(0.5 / 3.0), 0.5}, {1, std::sqrt(0.5 / 1.0), 0.5}}};
  const KWReport r = kw_verify(s, opt, 1e-7);
  CHECK(r.verdict == Verdict::optimal);
  CHECK(r.support.size() == 4);
  const KWReport rd = kw_verify(s, to_discrete(opt), 1e-7);
  CHECK(rd.verdict == Verdict::optimal);
  CHECK(rd.minimizer == "exact");
  CHECK(rd.min_psi == doctest::Approx(r.min_psi).epsilon(1e-9));

  const KWReport sing = kw_verify(s, RhombicDesign{2, {{0, 1.0, 1.0}}}, 1e-7);
  CHECK(sing.verdict == Verdict::not_optimal);
  CHECK(std::isinf(sing.min_psi));
  CHECK_FALSE(sing.note.empty());

  RhombicDesign bad = opt;
  bad.orbits[0].weight += 0.05;
  bad.orbits[0].weight /= 1.05;
  bad.orbits[1].weight /= 1.05;
  CHECK(kw_verify(s, bad, 1e-7).verdict == Verdict::not_optimal);
}

TEST_CASE("non-invariant designs use the dense route") {
  const DispersionSpec s{2, 1.0, 2.0, 0.5};
  DiscreteDesign dd{2, {{Eigen::Vector2d(1, 1), 0.3}, {Eigen::Vector2d(-1, 1), 0.3}, {Eigen::Vector2d(0.2, -1), 0.4}}};
  const KWReport r = kw_verify(s, dd, 1e-7);
  CHECK(r.minimizer == "grid");
  CHECK(r.verdict == Verdict::not_optimal);
  CHECK(psi_dense(gamma_dense(s, info_dense(s, dd)), r.argmin) == doctest::Approx(r.min_psi).epsilon(1e-12));
}

TEST_CASE("the two equivalence-theorem forms agree pointwise") {
  testing::Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 4;
    const auto s = testing::random_spec(k, rng);
    const auto dd = to_discrete(testing::random_rhombic(k, rng));
    const Eigen::MatrixXd m = info_dense(s, dd);
    const Eigen::MatrixXd minv = m.inverse();
    const Eigen::MatrixXd gamma = gamma_dense(s, m);
    for (int i = 0; i < 20; ++i) {
      const Point x = testing::random_point(k, rng);
      const Eigen::VectorXd f = regression_vector(x);
      const double sigma2 = testing::variance_direct(s, x);
      const double d = f.dot(minv * f) / sigma2;
      const double ps = psi_dense(gamma, x);
      CHECK(ps == doctest::Approx(sigma2 * ((k + 1) - d)).epsilon(1e-9));
      CHECK((d <= k + 1) == (ps >= 0.0));
    }
  }
}
