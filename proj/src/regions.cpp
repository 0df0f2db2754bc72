#include "optdes/regions.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "optdes/errors.hpp"
#include "optdes/kernels.hpp"
#include "optdes/solvers.hpp"

namespace optdes {

const char* to_string(Region r) {
  switch (r) {
    case Region::vertex:
      return "vertex";
    case Region::non_vertex:
      return "non_vertex";
    case Region::boundary:
      return "boundary";
  }
  return "unknown";
}

const char* to_string(Confirmed c) {
  switch (c) {
    case Confirmed::vertex:
      return "vertex";
    case Confirmed::vertex_single:
      return "vertex_single";
    case Confirmed::non_vertex:
      return "non_vertex";
    case Confirmed::none_found:
      return "none_found";
    case Confirmed::inconclusive:
      return "inconclusive";
    case Confirmed::excluded:
      return "excluded";
  }
  return "unknown";
}

double boundary_poly(const DispersionSpec& spec) {
  const double k = spec.k;
  return (spec.d1 - spec.d2) * (spec.d1 + (k - 1.0) * spec.d2) - spec.d0 * (spec.d1 + (k - 2.0) * spec.d2);
}

Region predict_region(const DispersionSpec& spec, double tol) {
  const double v = boundary_poly(spec);
  const double band = tol * spec.d0 * spec.d0;
  if (v <= -band) return Region::vertex;
  if (v >= band) return Region::non_vertex;
  return Region::boundary;
}

bool consistent(const RegionVerdict& v) {
  if (!v.confirmed || v.predicted == Region::boundary) return true;
  switch (*v.confirmed) {
    case Confirmed::non_vertex:
      return v.predicted == Region::non_vertex;
    case Confirmed::vertex:
      return v.predicted == Region::vertex;
    default:
      return true;
  }
}

Range default_d1_range(int) { return {0.0, 4.0}; }
Range default_d2_range(int k) { return {-4.0 / (k - 1), 4.0}; }

namespace {

Confirmed classify_design(const SolveResult& r) {
  const RhombicDesign* rd = r.rhombic();
  if (r.kw.verdict != Verdict::optimal || rd == nullptr)
    return r.converged ? Confirmed::none_found : Confirmed::inconclusive;
  const auto sup = rd->supported();
  for (const auto& o : sup)
    if (o.level < 1.0 - 1e-6) return Confirmed::non_vertex;
  if (sup.size() == 1 && rd->k % 2 == 1 && sup.front().ell == max_orbit_index(rd->k)) return Confirmed::vertex_single;
  return Confirmed::vertex;
}

double cell_centre(const Range& r, int i, int n) { return r.lo + (r.hi - r.lo) * (i + 0.5) / n; }

std::vector<DispersionSpec> cell_specs(int k, const RegionMapOptions& opts) {
  if (k < 2) throw DomainError("region maps need k >= 2");
  if (opts.resolution < 1) throw DomainError("resolution must be positive");
  const Range r1 = opts.d1.value_or(default_d1_range(k));
  const Range r2 = opts.d2.value_or(default_d2_range(k));
  std::vector<DispersionSpec> specs;
  specs.reserve(static_cast<std::size_t>(opts.resolution) * opts.resolution);
  for (int row = 0; row < opts.resolution; ++row)
    for (int col = 0; col < opts.resolution; ++col)
      specs.push_back({k, 1.0, cell_centre(r1, col, opts.resolution), cell_centre(r2, row, opts.resolution)});
  return specs;
}

}  // namespace

RegionVerdict evaluate_cell(const DispersionSpec& spec, const RegionMapOptions& opts) {
  RegionVerdict v;
  v.spec = spec;
  v.boundary_value = boundary_poly(spec);
  v.predicted = predict_region(spec, opts.band);
  v.in_cone = is_positive_definite(spec);
  if (!v.in_cone) {
    v.confirmed = Confirmed::excluded;
    return v;
  }
  if (!opts.confirm) return v;
  NumericOptions nopts;
  nopts.max_sweeps = opts.max_sweeps;
  nopts.tolerance = opts.tolerance;
  try {
    const SolveResult r = numeric_rhombic(spec, nopts);
    v.confirmed = classify_design(r);
    v.min_psi = r.kw.min_psi;
  } catch (const SingularityError&) {
    v.confirmed = Confirmed::none_found;
  }
  return v;
}

std::vector<RegionVerdict> region_map_serial(int k, const RegionMapOptions& opts) {
  const auto specs = cell_specs(k, opts);
  std::vector<RegionVerdict> out(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    out[i] = evaluate_cell(specs[i], opts);
    out[i].row = static_cast<int>(i) / opts.resolution;
    out[i].col = static_cast<int>(i) % opts.resolution;
  }
  return out;
}

std::vector<RegionVerdict> region_map(int k, const RegionMapOptions& opts) {
  const auto specs = cell_specs(k, opts);
  std::vector<RegionVerdict> out(specs.size());
  kernels::set_jobs(opts.jobs);
  const auto n = static_cast<long long>(specs.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < n; ++i) {
    out[i] = evaluate_cell(specs[i], opts);
    out[i].row = static_cast<int>(i) / opts.resolution;
    out[i].col = static_cast<int>(i) % opts.resolution;
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<RegionVerdict>& table) {
  out << "d1,d2,boundary_value,predicted,confirmed\n";
  char buf[128];
  for (const auto& v : table) {
    const char* predicted = v.in_cone ? to_string(v.predicted) : "excluded";
    const char* confirmed = v.confirmed ? to_string(*v.confirmed) : "";
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,", v.spec.d1, v.spec.d2, v.boundary_value);
    out << buf << predicted << ',' << confirmed << '\n';
  }
}

bool ScanSummary::consistent_with_conjecture() const {
  if (k % 2 == 0) return failures == 0;
  return failures_at_or_below_half == 0;
}

ScanSummary summarize_scan(int k, const std::vector<RegionVerdict>& table) {
  ScanSummary s;
  s.k = k;
  for (const auto& v : table) {
    if (!v.in_cone) continue;
    ++s.cells;
    if (!consistent(v)) ++s.inconsistent;
    if (!v.confirmed) continue;
    const Confirmed c = *v.confirmed;
    if (c == Confirmed::none_found || c == Confirmed::inconclusive) {
      ++s.failures;
      if (v.spec.d2 <= v.spec.d1 / 2.0) ++s.failures_at_or_below_half;
      s.failure_specs.push_back(v.spec);
    } else {
      ++s.certified;
    }
  }
  return s;
}

ScanSummary conjecture_scan(int k, int resolution, std::vector<RegionVerdict>* table, const RegionMapOptions& base) {
  RegionMapOptions opts = base;
  opts.resolution = resolution;
  opts.confirm = true;
  auto cells = region_map(k, opts);
  ScanSummary s = summarize_scan(k, cells);
  if (table) *table = std::move(cells);
  return s;
}

}  // namespace optdes
