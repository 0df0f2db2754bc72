#pragma once

#include <Eigen/Dense>

#include "optdes/config.hpp"

namespace optdes {

using Point = Eigen::VectorXd;

/// Dispersion of the random coefficients: intercept variance d0 (with the
/// observational error already merged in), slope variance d1 and the common
/// slope covariance d2 for a K-factor linear model. p = K + 1 is derived.
struct DispersionSpec {
  int k = 2;
  double d0 = 1.0;
  double d1 = 1.0;
  double d2 = 0.0;

  int p() const { return k + 1; }
};

/// Completely symmetric K x K matrix (a1 - a2) I + a2 1 1^T.
struct SymPair {
  double a1 = 0.0;
  double a2 = 0.0;
  int k = 1;

  double eig_perp() const { return a1 - a2; }           // multiplicity K-1
  double eig_ones() const { return a1 + (k - 1) * a2; }  // along 1
  Eigen::MatrixXd dense() const;
};

/// Cone membership: d0 > 0, d1 > 0, -d1/(K-1) - slack <= d2 <= d1 + slack.
bool cone_contains(const DispersionSpec& spec, double slack = 0.0);

/// Strict interior of the cone, i.e. D positive definite.
bool is_positive_definite(const DispersionSpec& spec);

/// Throws DomainError unless k >= 2 and the spec lies in the cone.
void require_in_cone(const DispersionSpec& spec);

/// f(x) = (1, x_1, ..., x_K). Throws DomainError for coordinates outside [-1, 1].
Eigen::VectorXd regression_vector(const Point& x);

/// sigma^2(x) = d0 + d1 |x|^2 + 2 d2 sum_{i<j} x_i x_j, via the block form.
double variance_at(const DispersionSpec& spec, const Point& x);

SymPair slope_dispersion(const DispersionSpec& spec);

/// Dense (K+1)x(K+1) dispersion matrix; used by cross-checks and the generic path.
Eigen::MatrixXd dispersion_matrix(const DispersionSpec& spec);

/// Throws SingularityError when a1 = a2 or a1 + (K-1) a2 = 0 (within `guard`).
SymPair sym_inverse(const SymPair& m, double guard = kDefaultTolerances.singular);

}  // namespace optdes
