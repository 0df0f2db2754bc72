#include "optdes/designs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "optdes/errors.hpp"

namespace optdes {

namespace {

bool same_point(const Point& a, const Point& b, double tol) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

void DiscreteDesign::validate(double tol) const {
  if (k < 1) throw DomainError("design dimension must be positive");
  if (points.empty()) throw DomainError("design has no support points");
  double mass = 0.0;
  for (const auto& sp : points) {
    if (sp.x.size() != k) throw DomainError("support point dimension does not match k");
    if (!(sp.x.cwiseAbs().maxCoeff() <= 1.0)) throw DomainError("support point outside [-1, 1]^K");
    if (!(sp.w >= 0.0) || !std::isfinite(sp.w)) throw DomainError("design weights must be non-negative");
    mass += sp.w;
  }
  if (std::abs(mass - 1.0) > tol) throw DomainError("design weights must sum to 1");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (same_point(points[i].x, points[j].x, tol)) throw DomainError("design support points must be distinct");
}

void RhombicDesign::validate(double tol) const {
  if (k < 2) throw DomainError("rhombic design needs k >= 2");
  if (orbits.empty()) throw DomainError("rhombic design has no orbits");
  std::vector<bool> seen(max_orbit_index(k) + 1, false);
  double mass = 0.0;
  for (const auto& o : orbits) {
    if (o.ell < 0 || o.ell > max_orbit_index(k)) throw DomainError("orbit index out of range");
    if (seen[o.ell]) throw DomainError("orbit index " + std::to_string(o.ell) + " appears twice");
    seen[o.ell] = true;
    if (!(o.level > 0.0 && o.level <= 1.0)) throw DomainError("orbit level must lie in (0, 1]");
    if (!(o.weight >= 0.0) || !std::isfinite(o.weight)) throw DomainError("orbit weights must be non-negative");
    mass += o.weight;
  }
  if (std::abs(mass - 1.0) > tol) throw DomainError("orbit weights must sum to 1");
}

std::vector<Orbit> RhombicDesign::supported() const {
  std::vector<Orbit> out;
  for (const auto& o : orbits)
    if (o.weight > 0.0) out.push_back(o);
  std::sort(out.begin(), out.end(), [](const Orbit& a, const Orbit& b) { return a.ell < b.ell; });
  return out;
}

std::uint64_t binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t c = 1;
  for (int i = 1; i <= r; ++i) c = c * static_cast<std::uint64_t>(n - r + i) / static_cast<std::uint64_t>(i);
  return c;
}

std::uint64_t orbit_size(int k, int ell) {
  if (k < 1 || ell < 0 || ell > max_orbit_index(k)) throw DomainError("orbit index out of range");
  const std::uint64_t c = binomial(k, ell);
  return 2 * ell == k ? c : 2 * c;
}

std::vector<Point> expand_orbit(int k, int ell, double level) {
  if (k < 1 || ell < 0 || ell > max_orbit_index(k)) throw DomainError("orbit index out of range");
  if (!(level > 0.0 && level <= 1.0)) throw DomainError("orbit level must lie in (0, 1]");
  std::vector<Point> pts;
  pts.reserve(orbit_size(k, ell));
  // Lexicographic combinations of ell negative positions.
  std::vector<int> idx(ell);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    Point x = Point::Constant(k, level);
    for (int i : idx) x[i] = -level;
    pts.push_back(x);
    int pos = ell - 1;
    while (pos >= 0 && idx[pos] == k - ell + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < ell; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (2 * ell != k) {
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) pts.push_back(-pts[i]);
  }
  return pts;
}

DiscreteDesign to_discrete(const RhombicDesign& rd) {
  rd.validate();
  DiscreteDesign dd{rd.k, {}};
  for (const auto& o : rd.supported()) {
    const auto pts = expand_orbit(rd.k, o.ell, o.level);
    const double w = o.weight / static_cast<double>(pts.size());
    for (const auto& x : pts) dd.points.push_back({x, w});
  }
  return dd;
}

bool is_invariant(const DiscreteDesign& dd, double tol) {
  const auto has_image = [&](const Point& y, double w) {
    for (const auto& q : dd.points)
      if (same_point(q.x, y, tol)) return std::abs(q.w - w) <= tol;
    return false;
  };
  // Adjacent transpositions generate Sym(K); together with -I they generate the group.
  for (const auto& sp : dd.points) {
    if (!has_image(-sp.x, sp.w)) return false;
    for (int i = 0; i + 1 < dd.k; ++i) {
      Point y = sp.x;
      std::swap(y[i], y[i + 1]);
      if (!has_image(y, sp.w)) return false;
    }
  }
  return true;
}

RhombicDesign group_by_orbit(const DiscreteDesign& dd, double tol) {
  struct Acc {
    double level = 0.0;
    double weight = 0.0;
    std::size_t count = 0;
  };
  std::map<int, Acc> acc;
  for (const auto& sp : dd.points) {
    if (sp.w <= 0.0) continue;
    const double level = std::abs(sp.x[0]);
    if (level <= tol) throw DomainError("rhombic designs exclude the origin");
    if ((sp.x.cwiseAbs().array() - level).abs().maxCoeff() > tol)
      throw DomainError("support point is not on a space diagonal");
    const int neg = static_cast<int>((sp.x.array() < 0.0).count());
    const int ell = std::min(neg, dd.k - neg);
    auto& a = acc[ell];
    if (a.count > 0 && std::abs(a.level - level) > tol) throw DomainError("orbit carries two different levels");
    a.level = level;
    a.weight += sp.w;
    ++a.count;
  }
  RhombicDesign rd{dd.k, {}};
  for (const auto& [ell, a] : acc) {
    if (a.count != orbit_size(dd.k, ell)) throw DomainError("orbit is only partially supported");
    rd.orbits.push_back({ell, a.level, a.weight});
  }
  if (!is_invariant(dd, tol)) throw DomainError("design is not invariant");
  return rd;
}

}  // namespace optdes
