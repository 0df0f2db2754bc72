#include "optdes/kernels.hpp"

#include <algorithm>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace optdes::kernels {

namespace {

double quad_form(const Eigen::MatrixXd& q, const Eigen::VectorXd& x) {
  const Eigen::Index k = x.size();
  double v = q(0, 0) + 2.0 * q.row(0).tail(k).dot(x);
  v += x.dot(q.bottomRightCorner(k, k) * x);
  return v;
}

}  // namespace

std::size_t grid_size(int k, int n) {
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) total *= static_cast<std::size_t>(n);
  return total;
}

Eigen::VectorXd grid_point(std::size_t index, int k, int n) {
  Eigen::VectorXd x(k);
  for (int j = k - 1; j >= 0; --j) {
    const auto c = static_cast<int>(index % static_cast<std::size_t>(n));
    index /= static_cast<std::size_t>(n);
    // Integer numerator keeps endpoints, midpoint and mirror symmetry exact.
    x[j] = n > 1 ? static_cast<double>(2 * c - (n - 1)) / (n - 1) : 0.0;
  }
  return x;
}

void directional_values_serial(const Eigen::MatrixXd& g, const Eigen::MatrixXd& minv, std::span<double> out) {
  for (Eigen::Index i = 0; i < g.rows(); ++i) out[i] = g.row(i) * minv * g.row(i).transpose();
}

void directional_values_parallel(const Eigen::MatrixXd& g, const Eigen::MatrixXd& minv, std::span<double> out) {
  constexpr Eigen::Index kBlock = 512;
  const Eigen::Index n = g.rows();
  const Eigen::Index blocks = (n + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index lo = b * kBlock, rows = std::min(kBlock, n - lo);
    const auto block = g.middleRows(lo, rows);
    Eigen::Map<Eigen::VectorXd>(out.data() + lo, rows) = (block * minv).cwiseProduct(block).rowwise().sum();
  }
}

GridMinimum quadratic_grid_min_serial(const Eigen::MatrixXd& q, int k, int n) {
  GridMinimum best{std::numeric_limits<double>::infinity(), 0};
  const std::size_t total = grid_size(k, n);
  for (std::size_t i = 0; i < total; ++i) {
    const double v = quad_form(q, grid_point(i, k, n));
    if (v < best.value) best = {v, i};
  }
  return best;
}

GridMinimum quadratic_grid_min_parallel(const Eigen::MatrixXd& q, int k, int n) {
  GridMinimum best{std::numeric_limits<double>::infinity(), 0};
  const auto total = static_cast<long long>(grid_size(k, n));
#pragma omp parallel
  {
    GridMinimum local{std::numeric_limits<double>::infinity(), 0};
#pragma omp for schedule(static) nowait
    for (long long i = 0; i < total; ++i) {
      const double v = quad_form(q, grid_point(static_cast<std::size_t>(i), k, n));
      if (v < local.value) local = {v, static_cast<std::size_t>(i)};
    }
#pragma omp critical
    {
      if (local.value < best.value || (local.value == best.value && local.index < best.index)) best = local;
    }
  }
  return best;
}

void set_jobs(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

int max_jobs() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace optdes::kernels
