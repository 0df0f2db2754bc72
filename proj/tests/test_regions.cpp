#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>

#include "optdes/regions.hpp"
#include "support.hpp"

using namespace optdes;

TEST_CASE("boundary polynomial values") {
  CHECK(boundary_poly({3, 1.0, 1.0, 0.2}) == doctest::Approx(-0.08));
  CHECK(predict_region({3, 1.0, 1.0, 0.2}) == Region::vertex);
  CHECK(boundary_poly({2, 1.0, 2.0, 0.5}) == doctest::Approx(1.75));
  CHECK(predict_region({2, 1.0, 2.0, 0.5}) == Region::non_vertex);
  // On the two-factor threshold between the partial-vertex and vertex cases.
  const double d1 = 2.0, d2 = 0.5;
  const double d0 = (d1 * d1 - d2 * d2) / d1;
  CHECK(std::abs(boundary_poly({2, d0, d1, d2})) < 1e-14);
  CHECK(predict_region({2, d0, d1, d2}) == Region::boundary);
}

TEST_CASE("two-factor polynomial reduces to d1^2 - d2^2 - d0 d1") {
  testing::Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto s = testing::random_spec(2, rng);
    CHECK(boundary_poly(s) == doctest::Approx(s.d1 * s.d1 - s.d2 * s.d2 - s.d0 * s.d1));
  }
}

TEST_CASE("map layout and exclusions") {
  RegionMapOptions o;
  o.resolution = 8;
  const auto t = region_map(3, o);
  REQUIRE(t.size() == 64);
  for (int i = 0; i < 64; ++i) {
    CHECK(t[i].row == i / 8);
    CHECK(t[i].col == i % 8);
    CHECK(t[i].spec.d0 == 1.0);
    // Cells on a cone face have singular D and are excluded too.
    CHECK(t[i].in_cone == is_positive_definite(t[i].spec));
    if (t[i].in_cone) CHECK_FALSE(t[i].confirmed.has_value());
    else CHECK(t[i].confirmed == Confirmed::excluded);
  }
  CHECK(t[1].spec.d1 > t[0].spec.d1);
  CHECK(t[8].spec.d2 > t[0].spec.d2);
  CHECK(t[0].spec.d1 == doctest::Approx(0.25));  // cell centre of (0, 4] at 8 cells
}

TEST_CASE("parallel map equals serial map") {
  RegionMapOptions o;
  o.resolution = 12;
  o.confirm = true;
  for (int k : {2, 3}) {
    const auto a = region_map(k, o);
    const auto b = region_map_serial(k, o);
    REQUIRE(a.size() == b.size());
    std::ostringstream sa, sb;
    write_csv(sa, a);
    write_csv(sb, b);
    CHECK(sa.str() == sb.str());
  }
}

TEST_CASE("confirmed two-factor map is certified and sign consistent") {
  RegionMapOptions o;
  o.resolution = 20;
  o.confirm = true;
  const auto t = region_map(2, o);
  const ScanSummary s = summarize_scan(2, t);
  CHECK(s.cells > 0);
  CHECK(s.failures == 0);
  CHECK(s.certified == s.cells);
  CHECK(s.inconsistent == 0);
  for (const auto& v : t)
    if (v.confirmed) CHECK(consistent(v));
}

TEST_CASE("classification is scale invariant") {
  testing::Rng rng(9);
  RegionMapOptions o;
  o.confirm = true;
  for (int i = 0; i < 20; ++i) {
    const auto s = testing::random_spec(2 + i % 2, rng);
    const auto a = evaluate_cell(s, o);
    const auto b = evaluate_cell({s.k, 10 * s.d0, 10 * s.d1, 10 * s.d2}, o);
    CHECK(a.predicted == b.predicted);
    CHECK(a.confirmed == b.confirmed);
  }
}

TEST_CASE("csv format") {
  RegionMapOptions o;
  o.resolution = 3;
  o.d1 = Range{0.0, 3.0};
  o.d2 = Range{-3.0, 3.0};
  const auto t = region_map(2, o);
  std::ostringstream out;
  write_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "d1,d2,boundary_value,predicted,confirmed");
  std::getline(in, line);
  // d1 = 0.5, d2 = -2 is outside the cone.
  CHECK(line == "0.5,-2,-4.25,excluded,excluded");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 9);
}

TEST_CASE("scan summary rule") {
  ScanSummary s;
  s.k = 4;
  CHECK(s.consistent_with_conjecture());
  s.failures = 1;
  CHECK_FALSE(s.consistent_with_conjecture());
  s.k = 3;
  CHECK(s.consistent_with_conjecture());
  s.failures_at_or_below_half = 1;
  CHECK_FALSE(s.consistent_with_conjecture());
}
