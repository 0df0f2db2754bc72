#include "optdes/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "optdes/errors.hpp"

namespace optdes {

double default_kw_tolerance() {
  if (const char* env = std::getenv("OPTDES_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && std::isfinite(v) && v > 0.0) return v;
  }
  return kDefaultTolerances.kw;
}

Eigen::MatrixXd SymPair::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(k, k, a2);
  m.diagonal().setConstant(a1);
  return m;
}

bool cone_contains(const DispersionSpec& spec, double slack) {
  if (spec.k < 2) return false;
  if (!(spec.d0 > 0.0) || !(spec.d1 > 0.0)) return false;
  const double lower = -spec.d1 / (spec.k - 1);
  return spec.d2 >= lower - slack && spec.d2 <= spec.d1 + slack;
}

bool is_positive_definite(const DispersionSpec& spec) {
  if (!cone_contains(spec)) return false;
  const SymPair d = slope_dispersion(spec);
  return d.eig_perp() > 0.0 && d.eig_ones() > 0.0;
}

void require_in_cone(const DispersionSpec& spec) {
  if (spec.k < 2) throw DomainError("dimension k must be at least 2, got " + std::to_string(spec.k));
  if (!std::isfinite(spec.d0) || !std::isfinite(spec.d1) || !std::isfinite(spec.d2))
    throw DomainError("dispersion parameters must be finite");
  if (!cone_contains(spec))
    throw DomainError("dispersion (d0, d1, d2) lies outside the model cone");
}

Eigen::VectorXd regression_vector(const Point& x) {
  Eigen::VectorXd f(x.size() + 1);
  f[0] = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(std::abs(x[i]) <= 1.0)) throw DomainError("design point coordinate outside [-1, 1]");
    f[i + 1] = x[i];
  }
  return f;
}

double variance_at(const DispersionSpec& spec, const Point& x) {
  if (x.size() != spec.k) throw DomainError("point dimension does not match k");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(std::abs(x[i]) <= 1.0)) throw DomainError("design point coordinate outside [-1, 1]");
  const double sq = x.squaredNorm();
  const double s = x.sum();
  // 2 sum_{i<j} x_i x_j = s^2 - |x|^2
  return spec.d0 + spec.d1 * sq + spec.d2 * (s * s - sq);
}

SymPair slope_dispersion(const DispersionSpec& spec) { return {spec.d1, spec.d2, spec.k}; }

Eigen::MatrixXd dispersion_matrix(const DispersionSpec& spec) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(spec.p(), spec.p());
  d(0, 0) = spec.d0;
  d.bottomRightCorner(spec.k, spec.k) = slope_dispersion(spec).dense();
  return d;
}

SymPair sym_inverse(const SymPair& m, double guard) {
  const double perp = m.eig_perp();
  const double ones = m.eig_ones();
  const double scale = std::max(std::abs(m.a1), std::abs(m.a2));
  if (std::abs(perp) <= guard * scale || std::abs(ones) <= guard * scale)
    throw SingularityError("completely symmetric matrix is singular");
  const double off = -m.a2 / (perp * ones);
  return {1.0 / perp + off, off, m.k};
}

}  // namespace optdes
