#include "optdes/information.hpp"

#include <cmath>

#include "optdes/errors.hpp"

namespace optdes {

Eigen::MatrixXd InfoBlocks::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k + 1, k + 1);
  m(0, 0) = m0;
  m.bottomRightCorner(k, k) = slope().dense();
  return m;
}

Eigen::MatrixXd GammaBlocks::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k + 1, k + 1);
  m(0, 0) = g0;
  m.bottomRightCorner(k, k) = SymPair{g1, g2, k}.dense();
  return m;
}

double orbit_correlation(int k, int ell) {
  const double s = k - 2.0 * ell;
  return (s * s - k) / (static_cast<double>(k) * (k - 1));
}

double orbit_variance(const DispersionSpec& spec, int ell, double level) {
  const double s = spec.k - 2.0 * ell;
  return spec.d0 + level * level * (spec.k * spec.d1 + spec.d2 * (s * s - spec.k));
}

OrbitMoments orbit_moments(const DispersionSpec& spec, int ell, double level) {
  const int k = spec.k;
  const double var = orbit_variance(spec, ell, level);
  const double rho = orbit_correlation(k, ell);
  const double t2 = level * level / var;
  return {var, 1.0 / var, t2 * (1.0 - rho), t2 * (1.0 + (k - 1) * rho)};
}

InfoBlocks info_blocks_rhombic(const DispersionSpec& spec, const RhombicDesign& rd) {
  if (rd.k != spec.k) throw DomainError("design dimension does not match the dispersion spec");
  InfoBlocks ib{spec.k, 0.0, 0.0, 0.0};
  for (const auto& o : rd.supported()) {
    const double var = orbit_variance(spec, o.ell, o.level);
    if (!(var > 0.0)) throw SingularityError("non-positive variance on a support orbit");
    const double t2 = o.level * o.level;
    ib.m0 += o.weight / var;
    ib.m1 += o.weight * t2 / var;
    ib.m2 += o.weight * t2 * orbit_correlation(spec.k, o.ell) / var;
  }
  return ib;
}

Eigen::MatrixXd info_dense(const DispersionSpec& spec, const DiscreteDesign& dd) {
  if (dd.k != spec.k) throw DomainError("design dimension does not match the dispersion spec");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(spec.p(), spec.p());
  for (const auto& sp : dd.points) {
    if (sp.w <= 0.0) continue;
    const double var = variance_at(spec, sp.x);
    if (!(var > 0.0)) throw SingularityError("non-positive variance at a support point");
    const Eigen::VectorXd f = regression_vector(sp.x);
    m.noalias() += (sp.w / var) * f * f.transpose();
  }
  return m;
}

InfoBlocks blocks_from_dense(const Eigen::MatrixXd& m) {
  const int k = static_cast<int>(m.rows()) - 1;
  const auto slope = m.bottomRightCorner(k, k);
  const double diag = slope.diagonal().mean();
  const double off = k > 1 ? (slope.sum() - slope.diagonal().sum()) / (static_cast<double>(k) * (k - 1)) : 0.0;
  return {k, m(0, 0), diag, off};
}

LogDet log_det(const InfoBlocks& ib) {
  const SymPair s = ib.slope();
  const double perp = s.eig_perp();
  const double ones = s.eig_ones();
  if (!(ib.m0 > 0.0) || !(perp > 0.0) || !(ones > 0.0)) return {};
  return {std::log(ib.m0) + (ib.k - 1) * std::log(perp) + std::log(ones), false};
}

LogDet log_det_dense(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) return {};
  return {ev.array().log().sum(), false};
}

GammaBlocks gamma_blocks(const DispersionSpec& spec, const InfoBlocks& ib) {
  if (!(ib.m0 > 0.0)) throw SingularityError("information matrix is singular (m0)");
  const SymPair inv = sym_inverse(ib.slope());
  const int p = spec.p();
  return {spec.k, p * spec.d0 - 1.0 / ib.m0, p * spec.d1 - inv.a1, p * spec.d2 - inv.a2};
}

Eigen::MatrixXd gamma_dense(const DispersionSpec& spec, const Eigen::MatrixXd& info, double guard) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  const auto& ev = es.eigenvalues();
  if (!(ev.minCoeff() > guard * ev.maxCoeff()))
    throw SingularityError("information matrix is singular");
  const Eigen::MatrixXd inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return spec.p() * dispersion_matrix(spec) - inv;
}

}  // namespace optdes
