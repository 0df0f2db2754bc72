#include "optdes/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optdes/errors.hpp"
#include "optdes/kernels.hpp"

namespace optdes {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::optimal:
      return "optimal";
    case Verdict::not_optimal:
      return "not_optimal";
    case Verdict::borderline:
      return "borderline";
  }
  return "not_optimal";
}

double psi(const GammaBlocks& gb, const Point& x) {
  const double s = x.sum();
  return gb.g0 + (gb.g1 - gb.g2) * x.squaredNorm() + gb.g2 * s * s;
}

double psi_dense(const Eigen::MatrixXd& gamma, const Point& x) {
  const Eigen::Index k = x.size();
  return gamma(0, 0) + 2.0 * gamma.row(0).tail(k).dot(x) + x.dot(gamma.bottomRightCorner(k, k) * x);
}

BoxMinimum min_psi_box(const GammaBlocks& gb, int k) {
  const double a = gb.g1 - gb.g2;
  const double b = gb.g2;
  const double scale = std::abs(gb.g0) + std::abs(a) * k + std::abs(b) * k * k;
  const double tie = 1e-14 * std::max(scale, 1e-300);

  BoxMinimum best{std::numeric_limits<double>::infinity(), Point()};
  const auto consider = [&](int n_minus, int n_free, int n_plus, double c) {
    Point x(k);
    x.head(n_minus).setConstant(-1.0);
    x.segment(n_minus, n_free).setConstant(c);
    x.tail(n_plus).setConstant(1.0);
    const double norm2 = n_minus + n_plus + n_free * c * c;
    const double s = n_plus - n_minus + n_free * c;
    const double v = gb.g0 + a * norm2 + b * s * s;
    if (v < best.value - tie) {
      best = {v, x};
    } else if (v <= best.value + tie &&
               std::lexicographical_compare(x.begin(), x.end(), best.argmin.begin(), best.argmin.end())) {
      best = {std::min(v, best.value), x};
    }
  };

  consider(0, k, 0, 0.0);  // origin
  for (int n_minus = 0; n_minus <= k; ++n_minus) {
    for (int n_plus = 0; n_plus + n_minus <= k; ++n_plus) {
      const int n_free = k - n_minus - n_plus;
      if (n_free == 0) {
        consider(n_minus, 0, n_plus, 0.0);
        continue;
      }
      const double denom = a + b * n_free;
      // Degenerate family: psi is constant along the free direction, covered by c = +-1.
      if (std::abs(denom) <= 1e-15 * (std::abs(a) + std::abs(b) * n_free)) continue;
      const double c = -b * (n_plus - n_minus) / denom;
      if (std::abs(c) <= 1.0) consider(n_minus, n_free, n_plus, c);
    }
  }
  best.value = psi(gb, best.argmin);
  return best;
}

int dense_grid_points_per_axis(int k) {
  if (k <= 4) return 33;
  if (k <= 6) return 9;
  if (k <= 8) return 5;
  return 3;
}

Point refine_box_quadratic(const Eigen::MatrixXd& q, Point x, int max_passes) {
  const Eigen::Index k = x.size();
  for (int pass = 0; pass < max_passes; ++pass) {
    double moved = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      double h = q(0, i + 1);
      for (Eigen::Index j = 0; j < k; ++j)
        if (j != i) h += q(i + 1, j + 1) * x[j];
      const double qii = q(i + 1, i + 1);
      double xi;
      if (qii > 0.0) {
        xi = std::clamp(-h / qii, -1.0, 1.0);
      } else {
        const double lo = qii - 2.0 * h;
        const double hi = qii + 2.0 * h;
        xi = lo < hi ? -1.0 : (hi < lo ? 1.0 : x[i]);
      }
      moved = std::max(moved, std::abs(xi - x[i]));
      x[i] = xi;
    }
    if (moved <= 1e-15) break;
  }
  return x;
}

BoxMinimum min_psi_box_dense(const Eigen::MatrixXd& gamma, int k) {
  const int n = dense_grid_points_per_axis(k);
  const auto grid = kernels::quadratic_grid_min_parallel(gamma, k, n);
  std::vector<Point> starts{kernels::grid_point(grid.index, k, n), Point::Zero(k)};
  if (k <= 10) {
    for (std::size_t v = 0; v < (std::size_t{1} << k); ++v) {
      Point x(k);
      for (int i = 0; i < k; ++i) x[i] = (v >> (k - 1 - i)) & 1U ? 1.0 : -1.0;
      starts.push_back(x);
    }
  }
  BoxMinimum best{grid.value, kernels::grid_point(grid.index, k, n)};
  for (const auto& s : starts) {
    const Point x = refine_box_quadratic(gamma, s);
    const double v = psi_dense(gamma, x);
    if (v < best.value) best = {v, x};
  }
  best.value = psi_dense(gamma, best.argmin);
  return best;
}

Verdict classify(double min_psi, const std::vector<PsiAtPoint>& support, double tol) {
  bool support_ok = true;
  for (const auto& s : support) support_ok = support_ok && std::abs(s.psi) <= tol;
  if (min_psi >= -tol && support_ok) return Verdict::optimal;
  if (std::abs(min_psi) < 10.0 * tol) return Verdict::borderline;
  return Verdict::not_optimal;
}

namespace {

KWReport singular_report(int k, double tol, const std::string& why) {
  KWReport r;
  r.verdict = Verdict::not_optimal;
  r.min_psi = -std::numeric_limits<double>::infinity();
  r.argmin = Point::Zero(k);
  r.tolerance = tol;
  r.minimizer = "none";
  r.note = why;
  return r;
}

}  // namespace

KWReport kw_verify(const DispersionSpec& spec, const DiscreteDesign& dd, double tol) {
  dd.validate();
  if (dd.k != spec.k) throw DomainError("design dimension does not match the dispersion spec");
  Eigen::MatrixXd gamma;
  try {
    gamma = gamma_dense(spec, info_dense(spec, dd));
  } catch (const SingularityError& e) {
    return singular_report(spec.k, tol, std::string("singular information matrix: ") + e.what());
  }
  KWReport r;
  r.tolerance = tol;
  BoxMinimum m;
  if (is_invariant(dd)) {
    const InfoBlocks gb = blocks_from_dense(gamma);
    m = min_psi_box({spec.k, gb.m0, gb.m1, gb.m2}, spec.k);
    r.minimizer = "exact";
  } else {
    m = min_psi_box_dense(gamma, spec.k);
    r.minimizer = "grid";
  }
  r.min_psi = m.value;
  r.argmin = m.argmin;
  for (const auto& sp : dd.points)
    if (sp.w > 0.0) r.support.push_back({sp.x, psi_dense(gamma, sp.x)});
  r.verdict = classify(r.min_psi, r.support, tol);
  return r;
}

KWReport kw_verify(const DispersionSpec& spec, const RhombicDesign& rd, double tol) {
  rd.validate();
  const InfoBlocks ib = info_blocks_rhombic(spec, rd);
  if (log_det(ib).singular) return singular_report(spec.k, tol, "singular information matrix");
  GammaBlocks gb;
  try {
    gb = gamma_blocks(spec, ib);
  } catch (const SingularityError& e) {
    return singular_report(spec.k, tol, std::string("singular information matrix: ") + e.what());
  }
  KWReport r;
  r.tolerance = tol;
  const BoxMinimum m = min_psi_box(gb, spec.k);
  r.min_psi = m.value;
  r.argmin = m.argmin;
  for (const auto& o : rd.supported())
    for (const auto& x : expand_orbit(spec.k, o.ell, o.level)) r.support.push_back({x, psi(gb, x)});
  r.verdict = classify(r.min_psi, r.support, tol);
  return r;
}

}  // namespace optdes
