#pragma once

namespace optdes {

struct Tolerances {
  double equality = 1e-9;
  double singular = 1e-12;
  // Default verdict tolerance on the sensitivity function.
  double kw = 1e-7;
};

inline constexpr Tolerances kDefaultTolerances{};

// Reads OPTDES_TOL if set and parseable, otherwise returns the built-in default.
double default_kw_tolerance();

}  // namespace optdes
