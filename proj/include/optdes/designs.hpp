#pragma once

#include <cstdint>
#include <vector>

#include "optdes/model.hpp"

namespace optdes {

struct SupportPoint {
  Point x;
  double w = 0.0;
};

/// Approximate design: finitely many distinct points of [-1,1]^K with weights summing to 1.
struct DiscreteDesign {
  int k = 2;
  std::vector<SupportPoint> points;

  /// Throws DomainError on negative weights, mass != 1, wrong dimension,
  /// points outside the box or duplicated points.
  void validate(double tol = 1e-12) const;
};

/// One orbit of Sym(K) x {+-1} on a space diagonal: all coordinates equal
/// +-level, with ell or K-ell of them negative.
struct Orbit {
  int ell = 0;
  double level = 1.0;
  double weight = 0.0;
};

struct RhombicDesign {
  int k = 2;
  std::vector<Orbit> orbits;

  void validate(double tol = 1e-12) const;
  /// Orbits with positive weight, sorted by ell.
  std::vector<Orbit> supported() const;
};

/// floor(K/2): the largest orbit index.
inline int max_orbit_index(int k) { return k / 2; }

std::uint64_t binomial(int n, int r);

/// N_ell = 2 C(K, ell), or C(K, ell) when ell = K/2.
std::uint64_t orbit_size(int k, int ell);

/// Points of O_ell(level). The canonical representative (first ell coordinates
/// negative) comes first; combinations run in lexicographic order, followed by
/// their global negations unless ell = K/2.
std::vector<Point> expand_orbit(int k, int ell, double level);

/// Uniform spread of each orbit weight over its points; zero-weight orbits are dropped.
DiscreteDesign to_discrete(const RhombicDesign& rd);

/// Invariance of support and weights under coordinate permutations and global sign change.
bool is_invariant(const DiscreteDesign& dd, double tol = 1e-12);

/// Inverse of to_discrete: groups points by orbit. Throws DomainError if the
/// design is not of rhombic form (off-diagonal points, origin, mixed levels).
RhombicDesign group_by_orbit(const DiscreteDesign& dd, double tol = 1e-12);

}  // namespace optdes
