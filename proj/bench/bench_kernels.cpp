#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <vector>

#include "optdes/kernels.hpp"
#include "optdes/regions.hpp"

using namespace optdes;

namespace {

Eigen::MatrixXd spd(int p) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(p, p);
  return a * a.transpose() + Eigen::MatrixXd::Identity(p, p);
}

void directional_serial(benchmark::State& st) {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Random(st.range(0), 4);
  const Eigen::MatrixXd m = spd(4);
  std::vector<double> out(g.rows());
  for (auto _ : st) {
    kernels::directional_values_serial(g, m, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * g.rows());
}

void directional_parallel(benchmark::State& st) {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Random(st.range(0), 4);
  const Eigen::MatrixXd m = spd(4);
  std::vector<double> out(g.rows());
  for (auto _ : st) {
    kernels::directional_values_parallel(g, m, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * g.rows());
}

void grid_min_serial(benchmark::State& st) {
  const Eigen::MatrixXd q = spd(4) - 2.0 * Eigen::MatrixXd::Identity(4, 4);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::quadratic_grid_min_serial(q, 3, static_cast<int>(st.range(0))));
}

void grid_min_parallel(benchmark::State& st) {
  const Eigen::MatrixXd q = spd(4) - 2.0 * Eigen::MatrixXd::Identity(4, 4);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::quadratic_grid_min_parallel(q, 3, static_cast<int>(st.range(0))));
}

void region_map_confirmed(benchmark::State& st) {
  RegionMapOptions o;
  o.resolution = 24;
  o.confirm = true;
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? region_map(3, o) : region_map_serial(3, o));
}

}  // namespace

BENCHMARK(directional_serial)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(directional_parallel)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(grid_min_serial)->Arg(33)->Arg(129);
BENCHMARK(grid_min_parallel)->Arg(33)->Arg(129);
BENCHMARK(region_map_confirmed)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
