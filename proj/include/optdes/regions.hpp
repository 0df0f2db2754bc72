#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "optdes/model.hpp"

namespace optdes {

enum class Region { vertex, non_vertex, boundary };

/// Solver outcome for one cell. vertex_single marks a certified single-orbit
/// all-vertex design, which the multi-orbit sign condition does not cover.
enum class Confirmed { vertex, vertex_single, non_vertex, none_found, inconclusive, excluded };

const char* to_string(Region r);
const char* to_string(Confirmed c);

/// (d1 - d2)(d1 + (K-1) d2) - d0 (d1 + (K-2) d2). Non-positive is necessary for an
/// optimal multi-orbit vertex design, positive for an optimum with an interior point.
double boundary_poly(const DispersionSpec& spec);

/// Sign with a band of half-width tol * d0^2 mapped to boundary.
Region predict_region(const DispersionSpec& spec, double tol = 1e-10);

struct RegionVerdict {
  DispersionSpec spec;
  int row = 0;  // d2 index
  int col = 0;  // d1 index
  bool in_cone = true;
  double boundary_value = 0.0;
  Region predicted = Region::boundary;
  std::optional<Confirmed> confirmed;
  double min_psi = 0.0;
};

/// Sign consistency of a confirmed cell: interior optima need predicted non_vertex,
/// multi-orbit vertex optima predicted vertex. Boundary-band and unconfirmed cells pass.
bool consistent(const RegionVerdict& v);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct RegionMapOptions {
  std::optional<Range> d1;  // default (0, 4]
  std::optional<Range> d2;  // default [-4/(K-1), 4]
  int resolution = 60;
  bool confirm = false;
  int max_sweeps = 50;
  double band = 1e-10;
  double tolerance = 1e-7;
  int jobs = 0;  // 0: OpenMP default
};

Range default_d1_range(int k);
Range default_d2_range(int k);

/// Cell-centred resolution x resolution sweep of (d1, d2) at d0 = 1, rows by
/// d2 and columns by d1, returned in row-major order.
std::vector<RegionVerdict> region_map(int k, const RegionMapOptions& opts);

/// Single-threaded reference for region_map.
std::vector<RegionVerdict> region_map_serial(int k, const RegionMapOptions& opts);

/// Classification of one cell (cone test, polynomial sign, optional solver run).
RegionVerdict evaluate_cell(const DispersionSpec& spec, const RegionMapOptions& opts);

void write_csv(std::ostream& out, const std::vector<RegionVerdict>& table);

struct ScanSummary {
  int k = 0;
  int cells = 0;      // in-cone cells with invertible D
  int certified = 0;  // optimal rhombic design found
  int failures = 0;   // none_found or inconclusive
  int failures_at_or_below_half = 0;  // failures with d2 <= d1/2
  int inconsistent = 0;               // sign-condition violations
  std::vector<DispersionSpec> failure_specs;
  /// Even K: no failures. Odd K: failures only where d2 > d1/2.
  bool consistent_with_conjecture() const;
};

ScanSummary summarize_scan(int k, const std::vector<RegionVerdict>& table);

/// Confirmed region map over the default cone window plus its summary.
ScanSummary conjecture_scan(int k, int resolution, std::vector<RegionVerdict>* table = nullptr,
                            const RegionMapOptions& base = {});

}  // namespace optdes
