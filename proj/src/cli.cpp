#include "optdes/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "optdes/errors.hpp"
#include "optdes/io.hpp"
#include "optdes/kernels.hpp"
#include "optdes/regions.hpp"
#include "optdes/solvers.hpp"

namespace optdes::cli {

namespace {

struct SpecFlags {
  std::optional<int> k;
  double d0 = 1.0;
  std::optional<double> d1;
  double d2 = 0.0;

  void add(CLI::App* app, bool required) {
    auto* ok = app->add_option("--k", k, "number of factors K");
    app->add_option("--d0", d0, "intercept variance (default 1)");
    auto* o1 = app->add_option("--d1", d1, "slope variance");
    app->add_option("--d2", d2, "common slope covariance (default 0)");
    if (required) {
      ok->required();
      o1->required();
    }
  }
  bool given() const { return k.has_value() || d1.has_value(); }
  DispersionSpec spec() const {
    if (!k || !d1) throw CLI::RequiredError("--k and --d1");
    DispersionSpec s{*k, d0, *d1, d2};
    require_in_cone(s);
    return s;
  }
};

struct Common {
  std::string out_path;
  std::string format;
  std::optional<double> tolerance;
  bool no_meta = false;
  int jobs = 0;

  double tol() const { return tolerance.value_or(default_kw_tolerance()); }
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write " + path);
  f << text;
}

void require_format(const std::string& given, const char* expected) {
  if (!given.empty() && given != expected)
    throw CLI::ValidationError("--format", std::string("this command writes ") + expected);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"D-optimal designs for linear regression with equi-correlated random coefficients", "optdes"};
  app.require_subcommand(1);

  SpecFlags sf;
  Common common;
  std::string method = "auto";
  std::string in_path;
  int grid = 41;
  int max_iterations = 100000;
  int resolution = 0;
  bool confirm = false;
  std::optional<double> d1_min, d1_max, d2_min, d2_max;

  const auto add_common = [&](CLI::App* sub, bool meta) {
    sub->add_option("--out", common.out_path, "output file (default stdout)");
    sub->add_option("--format", common.format, "output format");
    sub->add_option("--tolerance", common.tolerance, "verdict tolerance on psi (default 1e-7 or OPTDES_TOL)");
    if (meta) sub->add_flag("--no-meta", common.no_meta, "omit the metadata block");
  };

  auto* solve_cmd = app.add_subcommand("solve", "compute an optimal rhombic design");
  sf.add(solve_cmd, true);
  add_common(solve_cmd, true);
  solve_cmd->add_option("--method", method, "auto, closed_form or numeric")
      ->check(CLI::IsMember({"auto", "closed_form", "numeric"}));

  auto* verify_cmd = app.add_subcommand("verify", "check a design with the equivalence theorem");
  sf.add(verify_cmd, false);
  add_common(verify_cmd, false);
  verify_cmd->add_option("--in", in_path, "design JSON, or a solve result")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "D-optimal weights on a uniform grid");
  sf.add(oracle_cmd, true);
  add_common(oracle_cmd, true);
  oracle_cmd->add_option("--grid", grid, "points per axis (default 41)")->check(CLI::Range(2, 100000));
  oracle_cmd->add_option("--max-iterations", max_iterations, "iteration cap")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--jobs", common.jobs, "threads for the directional scan");

  const auto add_map_flags = [&](CLI::App* sub) {
    sub->add_option("--k", sf.k, "number of factors K")->required();
    sub->add_option("--d0", sf.d0, "scale of the given ranges (default 1)")->check(CLI::PositiveNumber);
    sub->add_option("--resolution", resolution, "cells per axis")->check(CLI::Range(1, 100000));
    sub->add_option("--d1-min", d1_min);
    sub->add_option("--d1-max", d1_max);
    sub->add_option("--d2-min", d2_min);
    sub->add_option("--d2-max", d2_max);
    sub->add_option("--jobs", common.jobs, "worker threads (default: all)");
    add_common(sub, false);
  };
  auto* map_cmd = app.add_subcommand("region-map", "classify a grid of (d1, d2) cells");
  add_map_flags(map_cmd);
  map_cmd->add_flag("--confirm", confirm, "run the numeric solver on every cell");
  auto* scan_cmd = app.add_subcommand("scan", "confirmed map with a summary of cells lacking an optimal rhombic design");
  add_map_flags(scan_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return usage;
  }

  try {
    const double tol = common.tol();
    kernels::set_jobs(common.jobs);

    if (*solve_cmd) {
      require_format(common.format, "json");
      const DispersionSpec spec = sf.spec();
      SolveResult r;
      NumericOptions nopts;
      nopts.tolerance = tol;
      if (method == "numeric") {
        r = numeric_rhombic(spec, nopts);
      } else if (method == "closed_form") {
        if (spec.k == 2)
          r = closed_form_k2(spec, tol);
        else if (spec.k == 3)
          r = closed_form_k3(spec, tol);
        else
          throw DomainError("closed forms exist for k = 2 and k = 3 only");
      } else {
        r = solve(spec, tol, nopts);
      }
      emit(io::dump(io::to_json(r, {!common.no_meta, &spec})), common.out_path, out);
      return ok;
    }

    if (*verify_cmd) {
      require_format(common.format, "json");
      const io::json doc = io::read_file(in_path);
      const bool wrapped = doc.is_object() && doc.contains("design");
      const AnyDesign design = io::design_from_json(wrapped ? doc.at("design") : doc);
      DispersionSpec spec;
      if (sf.given())
        spec = sf.spec();
      else if (wrapped && doc.contains("spec")) {
        spec = io::spec_from_json(doc.at("spec"));
        require_in_cone(spec);
      } else
        throw CLI::RequiredError("--k and --d1 (the design file carries no spec)");

      KWReport rep;
      double ld;
      if (const auto* rd = std::get_if<RhombicDesign>(&design)) {
        if (rd->k != spec.k) throw DomainError("design dimension does not match --k");
        rep = kw_verify(spec, *rd, tol);
        ld = log_det(info_blocks_rhombic(spec, *rd)).value;
      } else {
        const auto& dd = std::get<DiscreteDesign>(design);
        rep = kw_verify(spec, dd, tol);
        ld = log_det_dense(info_dense(spec, dd)).value;
      }
      io::json j = io::to_json(rep);
      j["log_det"] = std::isfinite(ld) ? io::json(ld) : io::json(nullptr);
      emit(io::dump(j), common.out_path, out);
      return ok;
    }

    if (*oracle_cmd) {
      require_format(common.format, "json");
      const DispersionSpec spec = sf.spec();
      OracleOptions oopts;
      oopts.tolerance = tol;
      oopts.max_iterations = max_iterations;
      const SolveResult r = grid_oracle(spec, grid, oopts);
      emit(io::dump(io::to_json(r, {!common.no_meta, &spec})), common.out_path, out);
      return ok;
    }

    // region-map and scan
    require_format(common.format, "csv");
    const int k = *sf.k;
    if (k < 2) throw DomainError("region maps need k >= 2");
    RegionMapOptions ropts;
    ropts.tolerance = tol;
    ropts.jobs = common.jobs;
    const Range r1 = default_d1_range(k), r2 = default_d2_range(k);
    // Ranges are given at scale d0; cells are evaluated at d0 = 1.
    if (d1_min || d1_max) ropts.d1 = Range{d1_min.value_or(r1.lo * sf.d0) / sf.d0, d1_max.value_or(r1.hi * sf.d0) / sf.d0};
    if (d2_min || d2_max) ropts.d2 = Range{d2_min.value_or(r2.lo * sf.d0) / sf.d0, d2_max.value_or(r2.hi * sf.d0) / sf.d0};
    std::ostringstream csv;
    if (*map_cmd) {
      ropts.resolution = resolution > 0 ? resolution : 60;
      ropts.confirm = confirm;
      write_csv(csv, region_map(k, ropts));
      emit(csv.str(), common.out_path, out);
      return ok;
    }
    std::vector<RegionVerdict> table;
    const ScanSummary s = conjecture_scan(k, resolution > 0 ? resolution : 40, &table, ropts);
    write_csv(csv, table);
    emit(csv.str(), common.out_path, out);
    io::json failures = io::json::array();
    for (const auto& f : s.failure_specs) failures.push_back({f.d1, f.d2});
    const io::json summary = {{"k", s.k},
                              {"cells", s.cells},
                              {"certified", s.certified},
                              {"failures", s.failures},
                              {"failures_at_or_below_half", s.failures_at_or_below_half},
                              {"sign_violations", s.inconsistent},
                              {"consistent_with_conjecture", s.consistent_with_conjecture()},
                              {"failure_cells", failures}};
    (common.out_path.empty() || common.out_path == "-" ? err : out) << io::dump(summary);
    return ok;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (residual " << e.residual() << ")\n";
    return no_convergence;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return domain;
  } catch (const SingularityError& e) {
    err << "error: " << e.what() << "\n";
    return domain;
  }
}

}  // namespace optdes::cli
