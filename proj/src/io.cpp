#include "optdes/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "optdes/errors.hpp"

namespace optdes::io {

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  if (j.is_null()) return -INFINITY;
  return j.get<double>();
}

json point_to_json(const Point& x) {
  json a = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
  return a;
}

Point point_from_json(const json& a) {
  if (!a.is_array()) throw DomainError("point must be an array of numbers");
  Point x(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) x[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return x;
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

json to_json(const DispersionSpec& spec) {
  return {{"k", spec.k}, {"d0", spec.d0}, {"d1", spec.d1}, {"d2", spec.d2}};
}

DispersionSpec spec_from_json(const json& j) {
  return guarded("spec", [&] {
    DispersionSpec s;
    s.k = j.at("k").get<int>();
    s.d0 = j.at("d0").get<double>();
    s.d1 = j.at("d1").get<double>();
    s.d2 = j.value("d2", 0.0);
    return s;
  });
}

json to_json(const RhombicDesign& rd) {
  json orbits = json::array();
  for (const auto& o : rd.orbits) orbits.push_back({{"ell", o.ell}, {"level", o.level}, {"weight", o.weight}});
  return {{"format", "rhombic"}, {"k", rd.k}, {"orbits", orbits}};
}

json to_json(const DiscreteDesign& dd) {
  json points = json::array();
  for (const auto& p : dd.points) points.push_back({{"x", point_to_json(p.x)}, {"w", p.w}});
  return {{"format", "discrete"}, {"k", dd.k}, {"points", points}};
}

json design_to_json(const AnyDesign& d) {
  if (const auto* rd = std::get_if<RhombicDesign>(&d)) return to_json(*rd);
  if (const auto* dd = std::get_if<DiscreteDesign>(&d)) return to_json(*dd);
  return nullptr;
}

AnyDesign design_from_json(const json& j) {
  return guarded("design", [&]() -> AnyDesign {
    if (!j.is_object()) throw DomainError("design must be a JSON object");
    const std::string format = j.at("format").get<std::string>();
    const int k = j.at("k").get<int>();
    if (k < 1) throw DomainError("design dimension must be positive");
    if (format == "rhombic") {
      RhombicDesign rd{k, {}};
      for (const auto& o : j.at("orbits"))
        rd.orbits.push_back({o.at("ell").get<int>(), o.at("level").get<double>(), o.at("weight").get<double>()});
      rd.validate(1e-9);
      return rd;
    }
    if (format == "discrete") {
      DiscreteDesign dd{k, {}};
      for (const auto& p : j.at("points")) dd.points.push_back({point_from_json(p.at("x")), p.at("w").get<double>()});
      dd.validate(1e-9);
      return dd;
    }
    throw DomainError("unknown design format '" + format + "'");
  });
}

json to_json(const KWReport& r) {
  json support = json::array();
  for (const auto& s : r.support) support.push_back({{"x", point_to_json(s.x)}, {"psi", number(s.psi)}});
  json j = {{"verdict", to_string(r.verdict)}, {"min_psi", number(r.min_psi)}, {"argmin", point_to_json(r.argmin)},
            {"support", support},          {"tolerance", r.tolerance},      {"minimizer", r.minimizer}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

KWReport kw_from_json(const json& j) {
  return guarded("report", [&] {
    KWReport r;
    const std::string v = j.at("verdict").get<std::string>();
    if (v == "optimal")
      r.verdict = Verdict::optimal;
    else if (v == "borderline")
      r.verdict = Verdict::borderline;
    else if (v == "not_optimal")
      r.verdict = Verdict::not_optimal;
    else
      throw DomainError("unknown verdict '" + v + "'");
    r.min_psi = number_from(j.at("min_psi"));
    r.argmin = point_from_json(j.at("argmin"));
    for (const auto& s : j.at("support")) r.support.push_back({point_from_json(s.at("x")), number_from(s.at("psi"))});
    r.tolerance = j.at("tolerance").get<double>();
    r.minimizer = j.value("minimizer", "exact");
    r.note = j.value("note", "");
    return r;
  });
}

json to_json(const SolveResult& r, const WriteOptions& opts) {
  json j = {{"method", to_string(r.method)},
            {"status", to_string(r.status)},
            {"region_label", r.region_label},
            {"log_det", number(r.log_det)},
            {"design", design_to_json(r.design)},
            {"kw", to_json(r.kw)}};
  if (!r.alternatives.empty()) {
    json alts = json::array();
    for (const auto& a : r.alternatives)
      alts.push_back({{"label", a.label}, {"design", to_json(a.design)}, {"log_det", number(a.log_det)}, {"kw", to_json(a.kw)}});
    j["alternatives"] = alts;
  }
  if (opts.spec) j["spec"] = to_json(*opts.spec);
  if (opts.meta) {
    json meta = {{"iterations", r.iterations}, {"converged", r.converged}, {"weight_prune", 1e-8}};
    if (r.method == Method::oracle) meta["cluster_radius"] = r.cluster_radius;
    if (!r.note.empty()) meta["note"] = r.note;
    j["meta"] = meta;
  }
  return j;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("invalid JSON: ") + e.what());
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace optdes::io
