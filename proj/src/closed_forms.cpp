#include <algorithm>
#include <cmath>

#include "optdes/errors.hpp"
#include "optdes/solvers.hpp"

namespace optdes {

const char* to_string(K2Case c) {
  switch (c) {
    case K2Case::i:
      return "k2:i";
    case K2Case::ii:
      return "k2:ii";
    case K2Case::iii:
      return "k2:iii";
  }
  return "k2:?";
}

const char* to_string(K3Case c) {
  switch (c) {
    case K3Case::i:
      return "k3:i";
    case K3Case::ii:
      return "k3:ii";
    case K3Case::iii:
      return "k3:iii";
    case K3Case::iv:
      return "k3:iv";
  }
  return "k3:?";
}

namespace {

bool feasible_level(double x) { return std::isfinite(x) && x > 0.0 && x <= 1.0; }
bool feasible_weight(double w) { return std::isfinite(w) && w >= 0.0 && w <= 1.0; }

std::optional<RhombicDesign> two_orbit(int k, double x0, double x1, double w0) {
  if (!feasible_level(x0) || !feasible_level(x1) || !feasible_weight(w0)) return std::nullopt;
  return RhombicDesign{k, {{0, x0, w0}, {1, x1, 1.0 - w0}}};
}

// Roots of a w^2 + b w + c = 0 without cancellation.
std::vector<double> real_roots(double a, double b, double c) {
  if (a == 0.0) return b != 0.0 ? std::vector<double>{-c / b} : std::vector<double>{};
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  std::vector<double> r{q / a};
  if (q != 0.0) r.push_back(c / q);
  return r;
}

SolveResult from_design(const DispersionSpec& spec, Method m, const std::string& label, RhombicDesign rd,
                        double tol) {
  SolveResult r;
  r.method = m;
  r.region_label = label;
  r.log_det = log_det(info_blocks_rhombic(spec, rd)).value;
  r.kw = kw_verify(spec, rd, tol);
  r.status = r.kw.verdict == Verdict::optimal ? SolveStatus::solved : SolveStatus::best_effort;
  r.design = std::move(rd);
  return r;
}

SolveResult no_closed_form(Method m, const std::string& label, const std::string& note) {
  SolveResult r;
  r.method = m;
  r.status = SolveStatus::no_closed_form;
  r.region_label = label;
  r.log_det = std::nan("");
  r.note = note;
  return r;
}

void require_k(const DispersionSpec& spec, int k) {
  require_in_cone(spec);
  if (spec.k != k) throw DomainError("closed form requires k = " + std::to_string(k));
}

}  // namespace

// ---- K = 2 ----------------------------------------------------------------

K2Case k2_region(const DispersionSpec& spec) {
  const double d0 = spec.d0, d1 = spec.d1, d2 = spec.d2;
  if (d0 <= d1 - std::abs(d2)) return K2Case::i;
  if (d0 <= (d1 * d1 - d2 * d2) / d1) return K2Case::ii;
  return K2Case::iii;
}

std::optional<RhombicDesign> k2_case_design(const DispersionSpec& spec, K2Case c) {
  const double d0 = spec.d0, d1 = spec.d1, d2 = spec.d2;
  switch (c) {
    case K2Case::i:
      return two_orbit(2, std::sqrt(d0 / (d1 + d2)), std::sqrt(d0 / (d1 - d2)), 0.5);
    case K2Case::ii:
      if (d2 > 0.0) {
        const double w = 2.0 / 3.0 - d0 / (6.0 * (d1 - d2));
        const double x0 = std::sqrt((d1 - d2) / (d1 + d2) * d0 / (2.0 * (d1 - d2) - d0));
        return two_orbit(2, x0, 1.0, w);
      } else {
        const double w = 1.0 / 3.0 + d0 / (6.0 * (d1 + d2));
        const double x1 = std::sqrt((d1 + d2) / (d1 - d2) * d0 / (2.0 * (d1 + d2) - d0));
        return two_orbit(2, 1.0, x1, w);
      }
    case K2Case::iii: {
      // 2 (d2 (6w^2 - 6w + 1) + d1 (1 - 2w)) + d0 (1 - 2w) = 0
      std::optional<RhombicDesign> best;
      double best_ld = -INFINITY;
      for (double w : real_roots(12.0 * d2, -(12.0 * d2 + 4.0 * d1 + 2.0 * d0), 2.0 * d2 + 2.0 * d1 + d0)) {
        if (!(w > 0.0 && w < 1.0)) continue;
        RhombicDesign rd{2, {{0, 1.0, w}, {1, 1.0, 1.0 - w}}};
        const double ld = log_det(info_blocks_rhombic(spec, rd)).value;
        if (ld > best_ld) {
          best_ld = ld;
          best = rd;
        }
      }
      return best;
    }
  }
  return std::nullopt;
}

SolveResult closed_form_k2(const DispersionSpec& spec, double tol) {
  require_k(spec, 2);
  if (spec.d2 == 0.0) {
    NumericOptions opts;
    opts.tolerance = tol;
    SolveResult r = numeric_rhombic(spec, opts);
    r.region_label = "diagonal";
    return r;
  }
  const K2Case c = k2_region(spec);
  auto rd = k2_case_design(spec, c);
  if (!rd) throw std::logic_error(std::string("closed form ") + to_string(c) + " has no admissible design");
  return from_design(spec, Method::closed_form_k2, to_string(c), *rd, tol);
}

// ---- K = 3 ----------------------------------------------------------------

bool k3_guard(const DispersionSpec& spec, K3Case c) {
  const double d0 = spec.d0, d1 = spec.d1, d2 = spec.d2;
  switch (c) {
    case K3Case::i:
      return (d0 < d1 + d2 && 0.0 < d2 && d2 < d1 / 2.0) ||
             (d0 < (d1 + 2.0 * d2) * (d1 + 2.0 * d2) / (d1 - 2.0 * d2) && d2 < 0.0);
    case K3Case::ii:
    case K3Case::iii:
      return d2 < d1 / 2.0 && d0 < (d1 - d2) * (d1 + 2.0 * d2) / (d1 + d2);
    case K3Case::iv:
      return d2 != 0.0 && ((d0 * (d1 + d2) >= (d1 - d2) * (d1 + 2.0 * d2) && d2 <= d1 / 2.0) ||
                           (d1 / 2.0 < d2 && 3.0 * d0 + 9.0 * d1 > 22.0 * d2));
  }
  return false;
}

bool k3_uncovered(const DispersionSpec& spec) {
  return spec.d1 / 2.0 < spec.d2 && 3.0 * spec.d0 + 9.0 * spec.d1 <= 22.0 * spec.d2;
}

std::optional<RhombicDesign> k3_case_design(const DispersionSpec& spec, K3Case c) {
  if (spec.k != 3 || !k3_guard(spec, c)) return std::nullopt;
  const double d0 = spec.d0, d1 = spec.d1, d2 = spec.d2;
  switch (c) {
    case K3Case::i:
      return two_orbit(3, std::sqrt(d0 * (d1 - 2.0 * d2)) / (d1 + 2.0 * d2), std::sqrt(d0 / (d1 - 2.0 * d2)), 0.25);
    case K3Case::ii: {
      const double w = (3.0 * d0 - 7.0 * d1 + 10.0 * d2) / (-16.0 * (d1 - d2));
      const double x0 = std::sqrt(d0 * (-d1 + 2.0 * d2) / ((d1 + 2.0 * d2) * (3.0 * d0 - 4.0 * d1 + 4.0 * d2)));
      return two_orbit(3, x0, 1.0, w);
    }
    case K3Case::iii: {
      const double den = 2.0 * d0 * d2 - d0 * d1 - 8.0 * d2 * d2 + 4.0 * d2 * d1 + 4.0 * d1 * d1;
      const double x1 = std::sqrt(3.0 * d0 * (d1 + 2.0 * d2) / den);
      const double w = (d1 - 2.0 * d2) * (d0 + 3.0 * d1 + 6.0 * d2) / (16.0 * (d1 - d2) * (d1 + 2.0 * d2));
      return two_orbit(3, 1.0, x1, w);
    }
    case K3Case::iv: {
      const double den = 64.0 * d2 * (d0 - 3.0 * d2 + 3.0 * d1);
      const double lead = 3.0 * d0 * d0 + 22.0 * d0 * d2 + 18.0 * d0 * d1 - 120.0 * d2 * d2 + 66.0 * d2 * d1 +
                          27.0 * d1 * d1;
      const double u = d0 - 2.0 * d2 + 3.0 * d1;
      const double rad = u * u * (d0 * d0 + 8.0 * d0 * d2 + 6.0 * d0 * d1 + 48.0 * d2 * d2 + 24.0 * d2 * d1 + 9.0 * d1 * d1);
      const double w = lead / den - 3.0 * std::sqrt(rad) / den;
      return two_orbit(3, 1.0, 1.0, w);
    }
  }
  return std::nullopt;
}

SolveResult closed_form_k3(const DispersionSpec& spec, double tol) {
  require_k(spec, 3);
  if (spec.d2 == 0.0) {
    NumericOptions opts;
    opts.tolerance = tol;
    SolveResult r = numeric_rhombic(spec, opts);
    r.region_label = "diagonal";
    return r;
  }
  if (auto rd = k3_case_design(spec, K3Case::i))
    return from_design(spec, Method::closed_form_k3, to_string(K3Case::i), *rd, tol);

  auto d_ii = k3_case_design(spec, K3Case::ii);
  auto d_iii = k3_case_design(spec, K3Case::iii);
  if (d_ii || d_iii) {
    // Margin of the interior level from the box face.
    const auto margin = [](const RhombicDesign& rd) {
      return 1.0 - std::min(rd.orbits[0].level, rd.orbits[1].level);
    };
    std::vector<SolveResult> found;
    if (d_ii) found.push_back(from_design(spec, Method::closed_form_k3, to_string(K3Case::ii), *d_ii, tol));
    if (d_iii) found.push_back(from_design(spec, Method::closed_form_k3, to_string(K3Case::iii), *d_iii, tol));
    std::stable_sort(found.begin(), found.end(), [&](const SolveResult& a, const SolveResult& b) {
      const bool va = a.status == SolveStatus::solved, vb = b.status == SolveStatus::solved;
      if (va != vb) return va;
      return margin(*a.rhombic()) > margin(*b.rhombic());
    });
    SolveResult primary = found.front();
    for (std::size_t i = 1; i < found.size(); ++i)
      primary.alternatives.push_back({found[i].region_label, *found[i].rhombic(), found[i].log_det, found[i].kw});
    return primary;
  }
  if (auto rd = k3_case_design(spec, K3Case::iv))
    return from_design(spec, Method::closed_form_k3, to_string(K3Case::iv), *rd, tol);
  if (k3_uncovered(spec))
    return no_closed_form(Method::closed_form_k3, "k3:uncovered", "no closed-form rhombic design in this region");
  return no_closed_form(Method::closed_form_k3, "k3:none", "no closed-form case applies");
}

}  // namespace optdes
