#pragma once

#include <Eigen/Dense>
#include <limits>

#include "optdes/designs.hpp"
#include "optdes/model.hpp"

namespace optdes {

/// Information matrix of an invariant design in block form
/// diag(m0, (m1 - m2) I + m2 1 1^T).
struct InfoBlocks {
  int k = 2;
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;

  SymPair slope() const { return {m1, m2, k}; }
  Eigen::MatrixXd dense() const;
};

/// Gamma = p D - M^{-1} in the same block form.
struct GammaBlocks {
  int k = 2;
  double g0 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;

  Eigen::MatrixXd dense() const;
};

/// log det M, or singular = true (value = -inf) when a factor is not positive.
struct LogDet {
  double value = -std::numeric_limits<double>::infinity();
  bool singular = true;
};

/// Per unit weight contribution of O_ell(level) to the information,
/// reduced to the three eigen-directions of the block form.
struct OrbitMoments {
  double variance = 0.0;  // sigma^2 on the orbit
  double m0 = 0.0;        // 1 / sigma^2
  double perp = 0.0;      // contribution to m1 - m2
  double ones = 0.0;      // contribution to m1 + (K-1) m2
};

/// Mean of x_i x_j / level^2 (i != j) over O_ell.
double orbit_correlation(int k, int ell);

/// sigma^2 on O_ell(level) = d0 + level^2 (K d1 + d2 ((K - 2 ell)^2 - K)).
double orbit_variance(const DispersionSpec& spec, int ell, double level);

OrbitMoments orbit_moments(const DispersionSpec& spec, int ell, double level);

InfoBlocks info_blocks_rhombic(const DispersionSpec& spec, const RhombicDesign& rd);

/// Sum of w f(x) f(x)^T / sigma^2(x) over the support. Throws SingularityError
/// if a support variance is not positive.
Eigen::MatrixXd info_dense(const DispersionSpec& spec, const DiscreteDesign& dd);

/// Block form of a dense matrix by averaging diagonal and off-diagonal slope entries.
InfoBlocks blocks_from_dense(const Eigen::MatrixXd& m);

/// m0 (m1 - m2)^{K-1} (m1 + (K-1) m2), from the two slope eigenvalues.
LogDet log_det(const InfoBlocks& ib);

LogDet log_det_dense(const Eigen::MatrixXd& m);

/// Throws SingularityError if M is singular.
GammaBlocks gamma_blocks(const DispersionSpec& spec, const InfoBlocks& ib);

Eigen::MatrixXd gamma_dense(const DispersionSpec& spec, const Eigen::MatrixXd& info, double guard = kDefaultTolerances.singular);

}  // namespace optdes
