#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "optdes/designs.hpp"
#include "optdes/equivalence.hpp"

namespace optdes {

enum class Method { closed_form_k2, closed_form_k3, numeric_rhombic, oracle };
enum class SolveStatus { solved, best_effort, no_closed_form };

const char* to_string(Method m);
const char* to_string(SolveStatus s);

using AnyDesign = std::variant<std::monostate, RhombicDesign, DiscreteDesign>;

/// A further candidate reported next to the primary design (e.g. the second
/// K=3 non-vertex family).
struct Alternative {
  std::string label;
  RhombicDesign design;
  double log_det = 0.0;
  KWReport kw;
};

struct SolveResult {
  Method method = Method::numeric_rhombic;
  SolveStatus status = SolveStatus::best_effort;
  std::string region_label;
  double log_det = 0.0;
  AnyDesign design;
  KWReport kw;
  std::vector<Alternative> alternatives;
  int iterations = 0;
  bool converged = true;
  double cluster_radius = 0.0;  // oracle only
  std::string note;

  const RhombicDesign* rhombic() const { return std::get_if<RhombicDesign>(&design); }
  const DiscreteDesign* discrete() const { return std::get_if<DiscreteDesign>(&design); }
};

// ---- closed forms, K = 2 -------------------------------------------------

enum class K2Case { i, ii, iii };

const char* to_string(K2Case c);

/// Region of the two-factor closed form; boundary ties go to the lower case.
K2Case k2_region(const DispersionSpec& spec);

/// Design of the given case, or nullopt when it is infeasible at `spec`
/// (level outside (0,1], no admissible weight root).
std::optional<RhombicDesign> k2_case_design(const DispersionSpec& spec, K2Case c);

/// d2 = 0 is delegated to numeric_rhombic.
SolveResult closed_form_k2(const DispersionSpec& spec, double tol);

// ---- closed forms, K = 3 -------------------------------------------------

enum class K3Case { i, ii, iii, iv };

const char* to_string(K3Case c);

/// Parameter guard of each case, without the feasibility check.
bool k3_guard(const DispersionSpec& spec, K3Case c);

/// d2 > d1/2 and 3 d0 + 9 d1 <= 22 d2.
bool k3_uncovered(const DispersionSpec& spec);

/// Design of the case when its guard holds and the formulas give levels in
/// (0,1] and weights in [0,1]; nullopt otherwise.
std::optional<RhombicDesign> k3_case_design(const DispersionSpec& spec, K3Case c);

/// Case order (i), (ii)/(iii), (iv). Between (ii) and (iii) the design whose
/// interior level has the larger distance to 1 is primary; verified others are
/// reported as alternatives.
SolveResult closed_form_k3(const DispersionSpec& spec, double tol);

// ---- numeric rhombic solver ----------------------------------------------

struct NumericOptions {
  int max_sweeps = 500;
  int max_weight_iterations = 2000;
  double weight_tol = 1e-10;
  double level_min = 1e-6;
  double improve_tol = 1e-12;
  double prune = 1e-8;
  std::vector<double> starts{0.25, 0.6, 1.0};
  double tolerance = kDefaultTolerances.kw;
};

/// Maximises log det over rhombic designs (one level and one weight per orbit)
/// and verifies the winner over the whole hypercube.
SolveResult numeric_rhombic(const DispersionSpec& spec, const NumericOptions& opts = {});

// ---- grid oracle ---------------------------------------------------------

struct OracleOptions {
  int max_iterations = 100000;
  double eps = 1e-7;
  double prune = 1e-8;
  int exchanges_per_iteration = 4;
  double tolerance = kDefaultTolerances.kw;
};

/// D-optimal weights on the uniform grid with `points_per_axis` points per
/// coordinate. Throws ConvergenceError if the iteration cap is reached.
SolveResult grid_oracle(const DispersionSpec& spec, int points_per_axis, const OracleOptions& opts = {});

// ---- dispatch ------------------------------------------------------------

/// Closed form where one exists and verifies (K = 2, 3 with d2 != 0), numeric otherwise.
SolveResult solve(const DispersionSpec& spec, double tol, const NumericOptions& opts = {});

/// Levels equal and weights proportional to orbit sizes (uniform 2^K factorial).
bool is_uniform_factorial(const RhombicDesign& rd, double tol = 1e-6);

/// "non_vertex" if a supported level is below 1 - 1e-6, otherwise "vertex".
std::string structure_label(const RhombicDesign& rd);

}  // namespace optdes
