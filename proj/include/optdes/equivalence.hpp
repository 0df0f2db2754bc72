#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "optdes/designs.hpp"
#include "optdes/information.hpp"

namespace optdes {

enum class Verdict { optimal, not_optimal, borderline };

const char* to_string(Verdict v);

struct PsiAtPoint {
  Point x;
  double psi = 0.0;
};

/// Outcome of the equivalence-theorem check for one design.
struct KWReport {
  Verdict verdict = Verdict::not_optimal;
  double min_psi = 0.0;
  Point argmin;
  std::vector<PsiAtPoint> support;
  double tolerance = 0.0;
  // "exact" (block enumeration) or "grid" (dense fallback).
  std::string minimizer = "exact";
  std::string note;
};

/// psi(x) = g0 + (g1 - g2) |x|^2 + g2 (sum x)^2.
double psi(const GammaBlocks& gb, const Point& x);

/// psi(x) = f(x)^T Gamma f(x) for a dense Gamma.
double psi_dense(const Eigen::MatrixXd& gamma, const Point& x);

struct BoxMinimum {
  double value = 0.0;
  Point argmin;
};

/// Exact global minimum of psi over [-1,1]^K. Any minimizer has its free
/// coordinates equal to a common c with (g1-g2) c + g2 s = 0, so it suffices
/// to enumerate (#at -1, #at +1, #free) and solve for c. Ties go to the
/// lexicographically smallest point (coordinates sorted ascending).
BoxMinimum min_psi_box(const GammaBlocks& gb, int k);

/// Best-effort minimum for a general Gamma: grid scan (33 points per axis for
/// K <= 4, 9 for K <= 6, fewer beyond) followed by exact coordinate descent
/// from the grid minimiser, the origin and the vertices.
BoxMinimum min_psi_box_dense(const Eigen::MatrixXd& gamma, int k);

int dense_grid_points_per_axis(int k);

/// Coordinate descent on f(x)^T Q f(x) over the box, minimizing exactly along each axis.
Point refine_box_quadratic(const Eigen::MatrixXd& q, Point x, int max_passes = 1000);

Verdict classify(double min_psi, const std::vector<PsiAtPoint>& support, double tol);

/// Equivalence check for an arbitrary discrete design. Invariant designs use the
/// exact block minimiser; others fall back to min_psi_box_dense.
KWReport kw_verify(const DispersionSpec& spec, const DiscreteDesign& dd, double tol);

/// Same check evaluated directly in block form.
KWReport kw_verify(const DispersionSpec& spec, const RhombicDesign& rd, double tol);

}  // namespace optdes
