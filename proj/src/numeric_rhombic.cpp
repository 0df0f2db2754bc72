#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "optdes/errors.hpp"
#include "optdes/solvers.hpp"

namespace optdes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct State {
  std::vector<double> level;
  std::vector<double> weight;
};

// Value with first and second derivative in the orbit level.
struct Jet {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};

// Rhombic log det as a function of (weights, levels). The information reduces
// to three sums A = m0, B = m1 - m2, C = m1 + (K-1) m2, each linear in the
// weights, and log det = log A + (K-1) log B + log C.
class RhombicObjective {
 public:
  explicit RhombicObjective(const DispersionSpec& spec) : spec_(spec), k_(spec.k), n_(spec.k / 2 + 1) {
    for (int ell = 0; ell < n_; ++ell) {
      const double s = k_ - 2.0 * ell;
      slope_var_.push_back(k_ * spec.d1 + spec.d2 * (s * s - k_));
      perp_.push_back(4.0 * ell * (k_ - ell) / (static_cast<double>(k_) * (k_ - 1)));
      ones_.push_back(s * s / k_);
    }
    coef_ = {1.0, static_cast<double>(k_ - 1), 1.0};
  }

  int orbits() const { return n_; }
  int p() const { return k_ + 1; }
  // Growth of the variance along the orbit's diagonal: sigma^2 = d0 + e t^2.
  double slope_var(int ell) const { return slope_var_[ell]; }
  double perp(int ell) const { return perp_[ell]; }
  double ones(int ell) const { return ones_[ell]; }
  double d0() const { return spec_.d0; }

  // Per unit weight contributions to (A, B, C) at level t.
  void moments(int ell, double t, Jet (&x)[3]) const {
    const double e = slope_var_[ell];
    const double d0 = spec_.d0;
    const double q = d0 + e * t * t;
    const double q2 = q * q, q3 = q2 * q;
    x[0] = {1.0 / q, -2.0 * e * t / q2, -2.0 * e / q2 + 8.0 * e * e * t * t / q3};
    const double base_v = t * t / q;
    const double base_d1 = 2.0 * d0 * t / q2;
    const double base_d2 = 2.0 * d0 / q2 - 8.0 * d0 * e * t * t / q3;
    x[1] = {perp_[ell] * base_v, perp_[ell] * base_d1, perp_[ell] * base_d2};
    x[2] = {ones_[ell] * base_v, ones_[ell] * base_d1, ones_[ell] * base_d2};
  }

  std::array<double, 3> sums(const State& s) const {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    Jet x[3];
    for (int ell = 0; ell < n_; ++ell) {
      if (s.weight[ell] <= 0.0) continue;
      moments(ell, s.level[ell], x);
      for (int j = 0; j < 3; ++j) out[j] += s.weight[ell] * x[j].v;
    }
    return out;
  }

  double value(const State& s) const {
    const auto x = sums(s);
    if (!(x[0] > 0.0 && x[1] > 0.0 && x[2] > 0.0)) return kNegInf;
    return std::log(x[0]) + coef_[1] * std::log(x[1]) + std::log(x[2]);
  }

  // tr(M^{-1} M_ell(t)); sums over the weights equal p at any design.
  double directional(int ell, double t, const std::array<double, 3>& sum) const {
    Jet x[3];
    moments(ell, t, x);
    return x[0].v / sum[0] + coef_[1] * x[1].v / sum[1] + x[2].v / sum[2];
  }

  // Gradient and Hessian in z = (w_0..w_{n-1}, t_0..t_{n-1}).
  void derivatives(const State& s, Eigen::VectorXd& g, Eigen::MatrixXd& h) const {
    const int dim = 2 * n_;
    const auto sum = sums(s);
    g = Eigen::VectorXd::Zero(dim);
    h = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<std::array<Jet, 3>> jets(n_);
    for (int ell = 0; ell < n_; ++ell) {
      Jet x[3];
      moments(ell, s.level[ell], x);
      for (int j = 0; j < 3; ++j) jets[ell][j] = x[j];
    }
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd grad(dim);
      for (int ell = 0; ell < n_; ++ell) {
        grad[ell] = jets[ell][j].v;
        grad[n_ + ell] = s.weight[ell] * jets[ell][j].d1;
      }
      const double c = coef_[j], xj = sum[j];
      g += (c / xj) * grad;
      h -= (c / (xj * xj)) * grad * grad.transpose();
      for (int ell = 0; ell < n_; ++ell) {
        h(ell, n_ + ell) += c * jets[ell][j].d1 / xj;
        h(n_ + ell, ell) += c * jets[ell][j].d1 / xj;
        h(n_ + ell, n_ + ell) += c * s.weight[ell] * jets[ell][j].d2 / xj;
      }
    }
  }

 private:
  DispersionSpec spec_;
  int k_;
  int n_;
  std::vector<double> slope_var_, perp_, ones_;
  std::array<double, 3> coef_{};
};

template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    }
  }
  return 0.5 * (a + b);
}

void normalize(std::vector<double>& w) {
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
}

class Optimizer {
 public:
  Optimizer(const RhombicObjective& obj, const NumericOptions& opts) : obj_(obj), opts_(opts) {}

  void multiplicative(State& s) const {
    const int n = obj_.orbits();
    const double p = obj_.p();
    for (int it = 0; it < opts_.max_weight_iterations; ++it) {
      const auto sum = obj_.sums(s);
      double max_rel = 0.0;
      for (int ell = 0; ell < n; ++ell) {
        if (s.weight[ell] <= 0.0) continue;
        const double w = s.weight[ell] * obj_.directional(ell, s.level[ell], sum) / p;
        if (s.weight[ell] > opts_.prune) max_rel = std::max(max_rel, std::abs(w - s.weight[ell]) / s.weight[ell]);
        s.weight[ell] = w;
      }
      normalize(s.weight);
      if (max_rel < opts_.weight_tol) break;
    }
  }

  void levels(State& s) const {
    const int n = obj_.orbits();
    for (int ell = 0; ell < n; ++ell) {
      if (s.weight[ell] <= 0.0) continue;
      if (s.weight[ell] >= 1e-6) {
        const auto f = [&](double t) {
          State c = s;
          c.level[ell] = t;
          return obj_.value(c);
        };
        const double t = golden_max(f, opts_.level_min, 1.0, 1e-10);
        const double current = f(s.level[ell]);
        const double at_t = f(t), at_one = f(1.0);
        if (at_one >= at_t && at_one > current) {
          s.level[ell] = 1.0;
        } else if (at_t > current) {
          s.level[ell] = t;
        }
      } else {
        // Nearly unsupported: move the level to where the orbit is most attractive.
        const auto sum = obj_.sums(s);
        const auto f = [&](double t) { return obj_.directional(ell, t, sum); };
        const double t = golden_max(f, opts_.level_min, 1.0, 1e-10);
        const double best = f(1.0) >= f(t) ? 1.0 : t;
        if (f(best) > f(s.level[ell])) s.level[ell] = best;
      }
    }
  }

  // Active-set Newton ascent on the supported weights (simplex eliminated via
  // the largest weight) and on the levels not pinned at a bound.
  void newton(State& s) const {
    const int n = obj_.orbits();
    const double lo = opts_.level_min;
    for (int iter = 0; iter < 100; ++iter) {
      const double f0 = obj_.value(s);
      if (!std::isfinite(f0)) return;
      Eigen::VectorXd g;
      Eigen::MatrixXd h;
      obj_.derivatives(s, g, h);

      std::vector<int> support;
      for (int ell = 0; ell < n; ++ell)
        if (s.weight[ell] > 0.0) support.push_back(ell);
      const int ref = *std::max_element(support.begin(), support.end(),
                                        [&](int a, int b) { return s.weight[a] < s.weight[b]; });
      std::vector<int> free_levels;
      for (int ell : support) {
        const double gt = g[n + ell];
        const bool pinned = (s.level[ell] >= 1.0 && gt >= 0.0) || (s.level[ell] <= lo && gt <= 0.0);
        if (!pinned) free_levels.push_back(ell);
      }
      const int weight_cols = static_cast<int>(support.size()) - 1;
      const int cols = weight_cols + static_cast<int>(free_levels.size());
      if (cols == 0) return;
      Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2 * n, cols);
      int col = 0;
      for (int ell : support) {
        if (ell == ref) continue;
        z(ell, col) = 1.0;
        z(ref, col) = -1.0;
        ++col;
      }
      for (int ell : free_levels) z(n + ell, col++) = 1.0;

      const Eigen::VectorXd gr = z.transpose() * g;
      if (gr.lpNorm<Eigen::Infinity>() < 1e-13) return;
      const Eigen::MatrixXd neg_h = -(z.transpose() * h * z);
      const double diag_scale = std::max(1.0, neg_h.diagonal().cwiseAbs().maxCoeff());
      Eigen::VectorXd delta;
      for (double mu = 0.0;; mu = mu == 0.0 ? 1e-12 * diag_scale : mu * 10.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(neg_h + mu * Eigen::MatrixXd::Identity(cols, cols));
        if (llt.info() == Eigen::Success) {
          delta = llt.solve(gr);
          if (delta.allFinite() && delta.dot(gr) > 0.0) break;
        }
        if (mu > 1e12 * diag_scale) return;
      }
      const Eigen::VectorXd dz = z * delta;

      double alpha = 1.0;
      for (int ell : support)
        if (dz[ell] < 0.0) alpha = std::min(alpha, -s.weight[ell] / dz[ell]);
      bool accepted = false;
      double f1 = f0;
      for (int ls = 0; ls < 60 && !accepted; ++ls, alpha *= 0.5) {
        State c = s;
        for (int ell : support) {
          c.weight[ell] = std::max(0.0, s.weight[ell] + alpha * dz[ell]);
          c.level[ell] = std::clamp(s.level[ell] + alpha * dz[n + ell], lo, 1.0);
        }
        normalize(c.weight);
        f1 = obj_.value(c);
        // Close to the optimum the change in log det drowns in rounding; a
        // short Newton step is then taken on the strength of the gradient.
        const bool tiny = alpha * dz.lpNorm<Eigen::Infinity>() < 1e-6;
        if (f1 > f0 || (tiny && f1 >= f0 - 1e-14 * std::max(1.0, std::abs(f0)))) {
          s = std::move(c);
          accepted = true;
        }
      }
      if (!accepted || alpha * dz.lpNorm<Eigen::Infinity>() < 1e-15) return;
    }
  }

  void prune(State& s) const {
    for (double& w : s.weight)
      if (w < opts_.prune) w = 0.0;
    normalize(s.weight);
  }

  // Re-admits an unsupported orbit whose best level would increase log det.
  bool revive(State& s) const {
    const int n = obj_.orbits();
    const auto sum = obj_.sums(s);
    bool any = false;
    for (int ell = 0; ell < n; ++ell) {
      if (s.weight[ell] > 0.0) continue;
      const auto f = [&](double t) { return obj_.directional(ell, t, sum); };
      double t = golden_max(f, opts_.level_min, 1.0, 1e-10);
      if (f(1.0) >= f(t)) t = 1.0;
      if (f(t) > obj_.p() * (1.0 + 1e-9)) {
        s.level[ell] = t;
        s.weight[ell] = 1e-3;
        any = true;
      }
    }
    if (any) normalize(s.weight);
    return any;
  }

  struct Outcome {
    State state;
    double value = kNegInf;
    int sweeps = 0;
    bool converged = false;
  };

  Outcome run(double start) const {
    const int n = obj_.orbits();
    State s;
    s.level.assign(n, start);
    s.weight.assign(n, 1.0 / n);
    return run(std::move(s));
  }

  Outcome run(State init) const {
    Outcome out;
    out.state = std::move(init);
    State& s = out.state;
    double prev = obj_.value(s);
    int revivals = 0;
    while (out.sweeps < opts_.max_sweeps) {
      ++out.sweeps;
      multiplicative(s);
      levels(s);
      newton(s);
      const double cur = obj_.value(s);
      if (cur - prev < opts_.improve_tol) {
        prune(s);
        newton(s);
        if (revivals < 3 && revive(s)) {
          ++revivals;
          prev = obj_.value(s);
          continue;
        }
        out.converged = true;
        break;
      }
      prev = cur;
    }
    if (!out.converged) {
      prune(s);
      newton(s);
    }
    out.value = obj_.value(s);
    return out;
  }

 private:
  const RhombicObjective& obj_;
  const NumericOptions& opts_;
};

// Optimal rhombic designs are not unique. In the per-orbit variables
// u = w / sigma^2 and v = w t^2 / sigma^2 the information sums are linear,
// so the optimal set is a polytope {u, v : v <= u, sums fixed}. Writing
// u = v + r with r >= 0, a member is selected by, in order:
//   1. the uniform factorial at a common level,
//   2. weights proportional to orbit sizes,
//   3. the orbit with the slowest variance growth held at the vertex,
//   4. no extra condition,
// taking the first condition the polytope meets and, within it, the point
// of least norm in (v, r).
class MemberSelector {
 public:
  MemberSelector(const RhombicObjective& obj, const State& best) : obj_(obj), n_(obj.orbits()) {
    const auto sum = obj.sums(best);
    for (int j = 0; j < 3; ++j) target_[j] = sum[j];
  }

  // Least-norm point satisfying the sums, the optional weight vector and the
  // vertex pin, or nullopt if that set is empty. Enumerates the zero pattern
  // of (v, r); callers keep the orbit count small.
  std::optional<State> select(const std::vector<double>* weights, int pinned) const {
    const int dim = 2 * n_;
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> rhs;
    const double d0 = obj_.d0();
    {
      Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(dim), b = a, c = a, w = a;
      for (int ell = 0; ell < n_; ++ell) {
        a[ell] = a[n_ + ell] = 1.0;
        b[ell] = obj_.perp(ell);
        c[ell] = obj_.ones(ell);
        w[ell] = d0 + obj_.slope_var(ell);
        w[n_ + ell] = d0;
      }
      rows = {a, b, c, w};
      rhs = {target_[0], target_[1], target_[2], 1.0};
    }
    if (weights)
      for (int ell = 0; ell < n_; ++ell) {
        Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(dim);
        w[ell] = d0 + obj_.slope_var(ell);
        w[n_ + ell] = d0;
        rows.push_back(w);
        rhs.push_back((*weights)[ell]);
      }
    Eigen::MatrixXd e(rows.size(), dim);
    Eigen::VectorXd f(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      e.row(i) = rows[i];
      f[i] = rhs[i];
    }
    const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());

    std::optional<Eigen::VectorXd> found;
    double found_norm = INFINITY;
    int found_zeros = -1;
    const unsigned forced = pinned >= 0 ? 1u << (n_ + pinned) : 0u;
    for (unsigned zero = 0; zero < (1u << dim); ++zero) {
      if ((zero & forced) != forced) continue;
      std::vector<int> free;
      for (int i = 0; i < dim; ++i)
        if (!(zero >> i & 1u)) free.push_back(i);
      if (free.empty()) continue;
      Eigen::MatrixXd ef(e.rows(), free.size());
      for (std::size_t j = 0; j < free.size(); ++j) ef.col(j) = e.col(free[j]);
      const Eigen::VectorXd zf = ef.completeOrthogonalDecomposition().solve(f);
      if ((ef * zf - f).cwiseAbs().maxCoeff() > 1e-10 * scale) continue;
      if (zf.minCoeff() < -1e-14 * scale) continue;
      // Near-ties go to the pattern with more zeros, so spurious tiny entries vanish.
      const double norm = zf.squaredNorm();
      const int zeros = dim - static_cast<int>(free.size());
      const double tie = 1e-12 * std::max(norm, found_norm);
      if (norm > found_norm + tie || (norm > found_norm - tie && zeros <= found_zeros)) continue;
      found_zeros = zeros;
      Eigen::VectorXd z = Eigen::VectorXd::Zero(dim);
      for (std::size_t j = 0; j < free.size(); ++j) z[free[j]] = std::max(0.0, zf[j]);
      found = z;
      found_norm = norm;
    }
    if (!found) return std::nullopt;

    State s;
    s.level.assign(n_, 1.0);
    s.weight.assign(n_, 0.0);
    for (int ell = 0; ell < n_; ++ell) {
      const double v = (*found)[ell], r = (*found)[n_ + ell];
      if (v <= 0.0) {
        if (r > 0.0) return std::nullopt;  // mass at the centre point
        continue;
      }
      s.weight[ell] = (d0 + obj_.slope_var(ell)) * v + d0 * r;
      s.level[ell] = r > 0.0 ? std::sqrt(v / (v + r)) : 1.0;
    }
    normalize(s.weight);
    return s;
  }

 private:
  const RhombicObjective& obj_;
  int n_;
  double target_[3] = {0.0, 0.0, 0.0};
};

// Orbit counts above this make the zero-pattern enumeration too costly.
constexpr int kMaxSelectorOrbits = 7;

State canonical_member(const RhombicObjective& obj, const NumericOptions& opts, const State& best, double value) {
  const int n = obj.orbits();
  const int k = obj.p() - 1;
  const double slack = 1e-12 * std::max(1.0, std::abs(value));
  std::vector<double> proportional(n);
  double total = 0.0;
  for (int ell = 0; ell < n; ++ell) total += static_cast<double>(orbit_size(k, ell));
  for (int ell = 0; ell < n; ++ell) proportional[ell] = orbit_size(k, ell) / total;

  {
    State s = best;
    s.weight = proportional;
    // log det along a common level; bisect on the sign of its slope.
    const auto slope = [&](double t) {
      std::array<double, 3> x{0.0, 0.0, 0.0}, dx{0.0, 0.0, 0.0};
      Jet jet[3];
      for (int ell = 0; ell < n; ++ell) {
        obj.moments(ell, t, jet);
        for (int j = 0; j < 3; ++j) {
          x[j] += s.weight[ell] * jet[j].v;
          dx[j] += s.weight[ell] * jet[j].d1;
        }
      }
      return dx[0] / x[0] + (k - 1) * dx[1] / x[1] + dx[2] / x[2];
    };
    double lo = opts.level_min, hi = 1.0;
    if (slope(hi) >= 0.0) lo = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    std::fill(s.level.begin(), s.level.end(), lo);
    if (obj.value(s) >= value - slack) return s;
  }
  if (n > kMaxSelectorOrbits) return best;

  const MemberSelector selector(obj, best);
  const auto accept = [&](const std::optional<State>& s) { return s && obj.value(*s) >= value - slack; };
  if (auto s = selector.select(&proportional, -1); accept(s)) return *s;
  std::vector<int> order(n);
  for (int ell = 0; ell < n; ++ell) order[ell] = ell;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return obj.slope_var(a) < obj.slope_var(b); });
  for (int ell : order)
    if (auto s = selector.select(nullptr, ell); accept(s)) return *s;
  if (auto s = selector.select(nullptr, -1); accept(s)) return *s;
  return best;
}

}  // namespace

SolveResult numeric_rhombic(const DispersionSpec& spec, const NumericOptions& opts) {
  require_in_cone(spec);
  // Optimal designs depend only on d1/d0 and d2/d0.
  const DispersionSpec unit{spec.k, 1.0, spec.d1 / spec.d0, spec.d2 / spec.d0};
  const RhombicObjective obj(unit);
  const Optimizer optimizer(obj, opts);

  std::optional<Optimizer::Outcome> best;
  for (double start : opts.starts) {
    auto out = optimizer.run(std::clamp(start, opts.level_min, 1.0));
    if (!best || out.value > best->value + 1e-13) best = std::move(out);
  }
  if (!best || !std::isfinite(best->value)) throw SingularityError("numeric rhombic search found no regular design");

  const State chosen = canonical_member(obj, opts, best->state, best->value);
  RhombicDesign rd{spec.k, {}};
  for (int ell = 0; ell < obj.orbits(); ++ell)
    if (chosen.weight[ell] > 0.0) rd.orbits.push_back({ell, chosen.level[ell], chosen.weight[ell]});

  SolveResult r;
  r.method = Method::numeric_rhombic;
  r.iterations = best->sweeps;
  r.converged = best->converged;
  r.log_det = log_det(info_blocks_rhombic(spec, rd)).value;
  r.kw = kw_verify(spec, rd, opts.tolerance);
  r.status = r.kw.verdict == Verdict::optimal ? SolveStatus::solved : SolveStatus::best_effort;
  r.region_label = structure_label(rd);
  if (!r.converged) r.note = "sweep budget exhausted";
  r.design = std::move(rd);
  return r;
}

std::string structure_label(const RhombicDesign& rd) {
  for (const auto& o : rd.supported())
    if (o.level < 1.0 - 1e-6) return "non_vertex";
  return "vertex";
}

bool is_uniform_factorial(const RhombicDesign& rd, double tol) {
  const auto sup = rd.supported();
  if (static_cast<int>(sup.size()) != max_orbit_index(rd.k) + 1) return false;
  const double total = std::pow(2.0, rd.k);
  for (const auto& o : sup) {
    if (std::abs(o.level - sup.front().level) > tol) return false;
    if (std::abs(o.weight - orbit_size(rd.k, o.ell) / total) > tol) return false;
  }
  return true;
}

SolveResult solve(const DispersionSpec& spec, double tol, const NumericOptions& opts) {
  require_in_cone(spec);
  NumericOptions nopts = opts;
  nopts.tolerance = tol;
  if ((spec.k == 2 || spec.k == 3) && spec.d2 != 0.0) {
    SolveResult closed = spec.k == 2 ? closed_form_k2(spec, tol) : closed_form_k3(spec, tol);
    if (closed.status == SolveStatus::solved) return closed;
    SolveResult numeric = numeric_rhombic(spec, nopts);
    numeric.note = "closed form " + closed.region_label + " not certified; numeric rhombic search used";
    return numeric;
  }
  SolveResult r = numeric_rhombic(spec, nopts);
  if (spec.d2 == 0.0) {
    r.region_label = "diagonal";
    if (const auto* rd = r.rhombic(); rd && !is_uniform_factorial(*rd))
      r.note = "optimal rhombic design found is not a uniform full factorial";
  }
  return r;
}

const char* to_string(Method m) {
  switch (m) {
    case Method::closed_form_k2:
      return "closed_form_k2";
    case Method::closed_form_k3:
      return "closed_form_k3";
    case Method::numeric_rhombic:
      return "numeric_rhombic";
    case Method::oracle:
      return "oracle";
  }
  return "unknown";
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::solved:
      return "solved";
    case SolveStatus::best_effort:
      return "best_effort";
    case SolveStatus::no_closed_form:
      return "no_closed_form";
  }
  return "unknown";
}

}  // namespace optdes
