#pragma once

#include <json.hpp>
#include <string>

#include "optdes/equivalence.hpp"
#include "optdes/solvers.hpp"

namespace optdes::io {

using json = nlohmann::ordered_json;

json to_json(const DispersionSpec& spec);
DispersionSpec spec_from_json(const json& j);

/// {"format": "rhombic", "k": K, "orbits": [{"ell", "level", "weight"}]}
json to_json(const RhombicDesign& rd);
/// {"format": "discrete", "k": K, "points": [{"x": [...], "w"}]}
json to_json(const DiscreteDesign& dd);
json design_to_json(const AnyDesign& d);

/// Parses either format and validates it. Throws DomainError on malformed input.
AnyDesign design_from_json(const json& j);

/// Non-finite numbers (a singular design's min_psi) are written as null.
json to_json(const KWReport& r);
KWReport kw_from_json(const json& j);

struct WriteOptions {
  bool meta = true;
  const DispersionSpec* spec = nullptr;
};

json to_json(const SolveResult& r, const WriteOptions& opts = {});

/// Parses JSON text; syntax errors become DomainError.
json parse(const std::string& text);
json read_file(const std::string& path);

/// Shortest round-trip formatting of doubles, two-space indent, trailing newline.
std::string dump(const json& j);

}  // namespace optdes::io
