#include <algorithm>
#include <cmath>
#include <numeric>

#include "optdes/errors.hpp"
#include "optdes/kernels.hpp"
#include "optdes/solvers.hpp"

namespace optdes {

namespace {

// Rows f(x)/sigma(x), so that M = sum_i w_i g_i g_i^T.
Eigen::MatrixXd scaled_regressors(const DispersionSpec& spec, const std::vector<Point>& pts) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(pts.size()), spec.p());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double s = std::sqrt(variance_at(spec, pts[i]));
    g.row(static_cast<Eigen::Index>(i)) = regression_vector(pts[i]).transpose() / s;
  }
  return g;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& g, const std::vector<int>& idx, const std::vector<double>& w) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.cols(), g.cols());
  for (std::size_t j = 0; j < idx.size(); ++j)
    if (w[j] > 0.0) m.noalias() += w[j] * g.row(idx[j]).transpose() * g.row(idx[j]);
  return m;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& g, const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), g.cols());
  for (std::size_t j = 0; j < idx.size(); ++j) out.row(static_cast<Eigen::Index>(j)) = g.row(idx[j]);
  return out;
}

// Caratheodory reduction: moves weight along null directions of w -> A w
// (columns of `a` are the per-atom moment vectors) until at most rows(a)
// atoms carry weight. A w is preserved. Atoms with lower `rank` are
// eliminated first, then lighter ones.
void reduce_support(const Eigen::MatrixXd& a, const std::vector<int>& rank, std::vector<double>& w) {
  const Eigen::Index m = a.rows();
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) live.push_back(i);
  while (static_cast<Eigen::Index>(live.size()) > m) {
    std::partial_sort(live.begin(), live.begin() + m + 1, live.end(), [&](std::size_t x, std::size_t y) {
      if (rank[x] != rank[y]) return rank[x] < rank[y];
      return w[x] < w[y] || (w[x] == w[y] && x < y);
    });
    Eigen::MatrixXd sub(m, m + 1);
    for (Eigen::Index j = 0; j <= m; ++j) sub.col(j) = a.col(static_cast<Eigen::Index>(live[j]));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullV);
    Eigen::VectorXd v = svd.matrixV().col(m);
    if (v.maxCoeff() <= 0.0) v = -v;
    double step = INFINITY;
    Eigen::Index hit = 0;
    for (Eigen::Index j = 0; j <= m; ++j)
      if (v[j] > 0.0 && w[live[j]] / v[j] < step) {
        step = w[live[j]] / v[j];
        hit = j;
      }
    for (Eigen::Index j = 0; j <= m; ++j) w[live[j]] = std::max(0.0, w[live[j]] - step * v[j]);
    w[live[hit]] = 0.0;
    std::erase_if(live, [&](std::size_t i) { return w[i] <= 0.0; });
  }
  double mass = 0.0;
  for (double v : w) mass += v;
  for (double& v : w) v /= mass;
}

// Grid indices of the orbit of `index` under coordinate permutations and the
// global sign change, in increasing order.
std::vector<std::size_t> grid_orbit(std::size_t index, int k, int n) {
  std::vector<int> c(k);
  for (int j = k - 1; j >= 0; --j) {
    c[j] = static_cast<int>(index % static_cast<std::size_t>(n));
    index /= static_cast<std::size_t>(n);
  }
  std::vector<std::size_t> out;
  for (int flip = 0; flip < 2; ++flip) {
    std::vector<int> v = c;
    if (flip)
      for (int& x : v) x = n - 1 - x;
    std::sort(v.begin(), v.end());
    do {
      std::size_t id = 0;
      for (int x : v) id = id * static_cast<std::size_t>(n) + static_cast<std::size_t>(x);
      out.push_back(id);
    } while (std::next_permutation(v.begin(), v.end()));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Invariant moments of an orbit at unit weight: mean g0^2, mean g_i^2,
// mean g_i g_j (i != j) over the orbit, and the mass.
Eigen::Vector4d orbit_moments(const Eigen::MatrixXd& g, const std::vector<std::size_t>& members) {
  const Eigen::Index k = g.cols() - 1;
  Eigen::Vector4d m = Eigen::Vector4d::Zero();
  for (std::size_t i : members) {
    const auto row = g.row(static_cast<Eigen::Index>(i));
    const double sq = row.tail(k).squaredNorm();
    const double sum = row.tail(k).sum();
    m[0] += row[0] * row[0];
    m[1] += sq / k;
    m[2] += (sum * sum - sq) / (k * (k - 1));
  }
  m.head<3>() /= static_cast<double>(members.size());
  m[3] = 1.0;
  return m;
}

// Multiplicative iterations on a small fixed support.
void polish_weights(const Eigen::MatrixXd& rows, std::vector<double>& w) {
  const double p = static_cast<double>(rows.cols());
  double mass = 0.0;
  for (double v : w) mass += v;
  for (double& v : w) v /= mass;
  std::vector<double> d(w.size());
  for (int it = 0; it < 20000; ++it) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows.cols(), rows.cols());
    for (std::size_t i = 0; i < w.size(); ++i)
      m.noalias() += w[i] * rows.row(static_cast<Eigen::Index>(i)).transpose() * rows.row(static_cast<Eigen::Index>(i));
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return;
    kernels::directional_values_serial(rows, llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols())), d);
    if (*std::max_element(d.begin(), d.end()) <= p * (1.0 + 1e-13)) return;
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) total += (w[i] *= d[i] / p);
    for (double& v : w) v /= total;
  }
}

// Greedy grouping: heaviest points seed clusters, lighter points within
// `radius` (max-norm) of a seed join it. Each cluster sits at its weighted centroid.
DiscreteDesign cluster(int k, const std::vector<Point>& pts, const std::vector<double>& w, double radius) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  std::vector<std::size_t> seeds;
  std::vector<Point> centre;
  std::vector<double> mass;
  for (std::size_t i : order) {
    std::size_t c = 0;
    while (c < seeds.size() && (pts[seeds[c]] - pts[i]).lpNorm<Eigen::Infinity>() > radius) ++c;
    if (c == seeds.size()) {
      seeds.push_back(i);
      centre.push_back(Point::Zero(k));
      mass.push_back(0.0);
    }
    centre[c] += w[i] * pts[i];
    mass[c] += w[i];
  }
  DiscreteDesign dd{k, {}};
  for (std::size_t c = 0; c < seeds.size(); ++c) {
    Point x = centre[c] / mass[c];
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], -1.0, 1.0);
    dd.points.push_back({x, mass[c]});
  }
  std::sort(dd.points.begin(), dd.points.end(), [](const SupportPoint& a, const SupportPoint& b) {
    return std::lexicographical_compare(a.x.begin(), a.x.end(), b.x.begin(), b.x.end());
  });
  return dd;
}

}  // namespace

SolveResult grid_oracle(const DispersionSpec& spec, int points_per_axis, const OracleOptions& opts) {
  require_in_cone(spec);
  if (points_per_axis < 2) throw DomainError("grid needs at least 2 points per axis");
  const int k = spec.k;
  const int n = points_per_axis;
  const double p = spec.p();
  const std::size_t total = kernels::grid_size(k, n);

  std::vector<Point> pts(total);
  for (std::size_t i = 0; i < total; ++i) pts[i] = kernels::grid_point(i, k, n);
  const Eigen::MatrixXd g = scaled_regressors(spec, pts);

  // Candidates still in play and their weights (parallel arrays).
  std::vector<int> active(total);
  std::iota(active.begin(), active.end(), 0);
  std::vector<double> w(total, 1.0 / static_cast<double>(total));

  std::vector<double> d;
  const auto directional = [&](const Eigen::MatrixXd& minv) {
    const Eigen::MatrixXd rows = gather_rows(g, active);
    d.resize(active.size());
    kernels::directional_values_parallel(rows, minv, d);
  };
  const auto inverse = [&]() -> Eigen::MatrixXd {
    const Eigen::MatrixXd m = weighted_gram(g, active, w);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw SingularityError("grid design became singular");
    return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  };

  int iter = 0;
  double residual = INFINITY;
  bool converged = false;
  while (!converged) {
    if (++iter > opts.max_iterations)
      throw ConvergenceError("grid oracle did not reach the optimality threshold", residual);

    Eigen::MatrixXd minv = inverse();
    directional(minv);
    const double dmax = *std::max_element(d.begin(), d.end());
    residual = dmax / p - 1.0;

    if (residual <= opts.eps) {
      // Check every grid point, not only the surviving candidates.
      std::vector<double> dall(total);
      kernels::directional_values_parallel(g, minv, dall);
      std::vector<char> in_play(total, 0);
      for (int i : active) in_play[i] = 1;
      std::size_t worst = 0;
      for (std::size_t i = 1; i < total; ++i)
        if (dall[i] > dall[worst]) worst = i;
      if (dall[worst] <= p * (1.0 + opts.eps)) {
        converged = true;
        break;
      }
      for (std::size_t i = 0; i < total; ++i)
        if (!in_play[i] && dall[i] > p * (1.0 + opts.eps)) {
          active.push_back(static_cast<int>(i));
          w.push_back(0.0);
        }
      // Wynn step towards the worst violator.
      const double a = (dall[worst] - p) / (p * (dall[worst] - 1.0));
      for (std::size_t j = 0; j < active.size(); ++j) {
        w[j] *= 1.0 - a;
        if (active[j] == static_cast<int>(worst)) w[j] += a;
      }
      continue;
    }

    // Drop candidates that cannot support any D-optimal design.
    const double eps = dmax - p;
    const double keep = p * (1.0 + eps / 2.0 - std::sqrt(eps * (4.0 + eps - 4.0 / p)) / 2.0);
    {
      std::size_t out = 0;
      double mass = 0.0;
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (d[j] < keep) continue;
        active[out] = active[j];
        w[out] = w[j];
        d[out] = d[j];
        mass += w[j];
        ++out;
      }
      active.resize(out);
      w.resize(out);
      d.resize(out);
      for (double& v : w) v /= mass;
    }

    // Multiplicative step.
    double mass = 0.0;
    for (std::size_t j = 0; j < active.size(); ++j) {
      w[j] *= d[j] / p;
      mass += w[j];
    }
    for (double& v : w) v /= mass;

    // Pairwise exchanges between the most and least attractive points.
    for (int e = 0; e < opts.exchanges_per_iteration; ++e) {
      minv = inverse();
      directional(minv);
      std::size_t hi = 0, lo = active.size();
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (d[j] > d[hi]) hi = j;
        if (w[j] > 0.0 && (lo == active.size() || d[j] < d[lo])) lo = j;
      }
      if (lo == active.size() || hi == lo) break;
      const double dkl = g.row(active[lo]) * minv * g.row(active[hi]).transpose();
      const double denom = 2.0 * (d[lo] * d[hi] - dkl * dkl);
      if (!(denom > 0.0)) break;
      const double a = std::clamp((d[hi] - d[lo]) / denom, -w[hi], w[lo]);
      w[lo] -= a;
      w[hi] += a;
      if (w[lo] < 0.0) w[lo] = 0.0;
    }
  }

  // Prune, then merge neighbouring grid points that share one true support point.
  std::vector<Point> sup;
  std::vector<double> sw;
  double mass = 0.0;
  for (std::size_t j = 0; j < active.size(); ++j)
    if (w[j] >= opts.prune) {
      sup.push_back(pts[active[j]]);
      sw.push_back(w[j]);
      mass += w[j];
    }
  for (double& v : sw) v /= mass;

  DiscreteDesign grid_design{k, {}};
  for (std::size_t i = 0; i < sup.size(); ++i) grid_design.points.push_back({sup[i], sw[i]});

  // Interior optima are attained by many grid designs. Averaging over the
  // symmetry group keeps optimality; a reduction over whole orbits then keeps
  // a sparse invariant design with the same M.
  std::vector<double> wfull(total, 0.0);
  for (std::size_t j = 0; j < active.size(); ++j)
    if (w[j] >= opts.prune) wfull[active[j]] = w[j] / mass;
  std::vector<std::vector<std::size_t>> orbits;
  std::vector<char> seen(total, 0);
  std::vector<double> ow;
  for (std::size_t i = 0; i < total; ++i) {
    if (wfull[i] <= 0.0 || seen[i]) continue;
    auto members = grid_orbit(i, k, n);
    double m = 0.0;
    for (std::size_t j : members) {
      seen[j] = 1;
      m += wfull[j];
    }
    orbits.push_back(std::move(members));
    ow.push_back(m);
  }
  // Orbits on the space diagonals (rhombic form) are kept in preference.
  Eigen::MatrixXd moments(4, static_cast<Eigen::Index>(orbits.size()));
  std::vector<int> rank(orbits.size());
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    moments.col(static_cast<Eigen::Index>(o)) = orbit_moments(g, orbits[o]);
    const Point& x = pts[orbits[o].front()];
    rank[o] = (x.cwiseAbs().array() == std::abs(x[0])).all() && x[0] != 0.0 ? 1 : 0;
  }
  reduce_support(moments, rank, ow);
  std::vector<Point> kept;
  std::vector<double> kw;
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    if (ow[o] < opts.prune) continue;
    for (std::size_t j : orbits[o]) {
      kept.push_back(pts[j]);
      kw.push_back(ow[o] / static_cast<double>(orbits[o].size()));
    }
  }

  const double pitch = 2.0 / (n - 1);
  DiscreteDesign clustered = cluster(k, kept, kw, pitch * (1.0 + 1e-9));
  {
    std::vector<Point> cx;
    std::vector<double> cw;
    for (const auto& sp : clustered.points) {
      cx.push_back(sp.x);
      cw.push_back(sp.w);
    }
    polish_weights(scaled_regressors(spec, cx), cw);
    for (std::size_t i = 0; i < cw.size(); ++i) clustered.points[i].w = cw[i];
  }

  SolveResult r;
  r.method = Method::oracle;
  r.iterations = iter;
  r.converged = true;
  r.cluster_radius = pitch;
  r.log_det = std::max(log_det_dense(info_dense(spec, grid_design)).value,
                       log_det_dense(info_dense(spec, clustered)).value);
  r.kw = kw_verify(spec, clustered, opts.tolerance);
  r.status = r.kw.verdict == Verdict::optimal ? SolveStatus::solved : SolveStatus::best_effort;
  r.region_label = "grid:" + std::to_string(n);
  r.note = std::to_string(grid_design.points.size()) + " grid points, " + std::to_string(kept.size()) + " after reduction, merged into " +
           std::to_string(clustered.points.size()) + " support points";
  r.design = std::move(clustered);
  return r;
}

}  // namespace optdes
