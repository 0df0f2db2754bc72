#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "optdes/designs.hpp"
#include "optdes/model.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Interior of the cone, kept away from the faces so D stays well conditioned.
inline optdes::DispersionSpec random_spec(int k, Rng& rng) {
  const double d0 = uniform(rng, 0.2, 3.0);
  const double d1 = uniform(rng, 0.2, 4.0);
  const double d2 = uniform(rng, -0.95 * d1 / (k - 1), 0.95 * d1);
  return {k, d0, d1, d2};
}

inline optdes::RhombicDesign random_rhombic(int k, Rng& rng) {
  optdes::RhombicDesign rd{k, {}};
  double total = 0.0;
  for (int ell = 0; ell <= k / 2; ++ell) {
    const double w = uniform(rng, 0.05, 1.0);
    rd.orbits.push_back({ell, uniform(rng, 0.1, 1.0), w});
    total += w;
  }
  for (auto& o : rd.orbits) o.weight /= total;
  return rd;
}

inline optdes::Point random_point(int k, Rng& rng) {
  optdes::Point x(k);
  for (int i = 0; i < k; ++i) x[i] = uniform(rng, -1.0, 1.0);
  return x;
}

// A coordinate permutation, optionally followed by x -> -x.
struct GroupElement {
  std::vector<int> perm;
  bool flip = false;

  optdes::Point operator()(const optdes::Point& x) const {
    optdes::Point y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = x[perm[i]];
    return flip ? optdes::Point(-y) : y;
  }
};

inline GroupElement random_group_element(int k, Rng& rng) {
  GroupElement g;
  g.perm.resize(k);
  std::iota(g.perm.begin(), g.perm.end(), 0);
  std::shuffle(g.perm.begin(), g.perm.end(), rng);
  g.flip = std::bernoulli_distribution(0.5)(rng);
  return g;
}

// Direct evaluation of f(x)^T D f(x) with the dense dispersion matrix.
inline double variance_direct(const optdes::DispersionSpec& s, const optdes::Point& x) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(s.k + 1, s.k + 1, s.d2);
  d(0, 0) = s.d0;
  for (int i = 1; i <= s.k; ++i) {
    d(0, i) = d(i, 0) = 0.0;
    d(i, i) = s.d1;
  }
  Eigen::VectorXd f(s.k + 1);
  f[0] = 1.0;
  f.tail(s.k) = x;
  return f.dot(d * f);
}

// M(xi) = sum w f f^T / sigma^2 computed point by point.
inline Eigen::MatrixXd info_direct(const optdes::DispersionSpec& s, const optdes::DiscreteDesign& dd) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(s.k + 1, s.k + 1);
  for (const auto& p : dd.points) {
    Eigen::VectorXd f(s.k + 1);
    f[0] = 1.0;
    f.tail(s.k) = p.x;
    m += p.w * f * f.transpose() / variance_direct(s, p.x);
  }
  return m;
}

}  // namespace testing
