#pragma once

// Data-parallel inner loops. Each kernel has a serial reference used by the
// tests and the benchmark; the parallel versions use OpenMP and reduce
// deterministically (lowest index wins ties).

#include <Eigen/Dense>
#include <cstddef>
#include <span>

namespace optdes::kernels {

/// out[i] = g_i^T Minv g_i for the rows g_i of `g`.
void directional_values_serial(const Eigen::MatrixXd& g, const Eigen::MatrixXd& minv, std::span<double> out);
void directional_values_parallel(const Eigen::MatrixXd& g, const Eigen::MatrixXd& minv, std::span<double> out);

struct GridMinimum {
  double value = 0.0;
  std::size_t index = 0;
};

/// Minimum of f(x)^T Q f(x), f(x) = (1, x), over the uniform grid with n points
/// per axis on [-1,1]^K. Grid index i enumerates points with coordinate 0 varying slowest.
GridMinimum quadratic_grid_min_serial(const Eigen::MatrixXd& q, int k, int n);
GridMinimum quadratic_grid_min_parallel(const Eigen::MatrixXd& q, int k, int n);

/// Coordinates of grid index i (n points per axis on [-1, 1]).
Eigen::VectorXd grid_point(std::size_t index, int k, int n);

std::size_t grid_size(int k, int n);

/// Sets the OpenMP thread count for subsequent parallel kernels; 0 keeps the default.
void set_jobs(int jobs);
int max_jobs();

}  // namespace optdes::kernels
