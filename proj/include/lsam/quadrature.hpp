#pragma once

#include <functional>
#include <vector>

#include "lsam/param_vec.hpp"

namespace lsam {

// Uniform tensor-product grid in 1 or 2 dimensions for trapezoidal
// quadrature. Point counts must be odd so the stride-2 subgrid used for the
// Richardson error estimate keeps both endpoints.
struct QuadratureGrid {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> points;

  int dim() const { return static_cast<int>(lo.size()); }
  double spacing(int axis) const {
    return (hi[axis] - lo[axis]) / (points[axis] - 1);
  }

  static QuadratureGrid uniform_1d(double lo, double hi, int points = 4001);
  static QuadratureGrid uniform_2d(double lo, double hi, int points = 401);

  void validate(int expected_dim) const;  // throws ConfigError
};

struct QuadratureResult {
  double log_value = 0.0;   // log of the integral
  double value = 0.0;       // exp(log_value); may overflow to inf
  double error_estimate = 0.0;  // |I_h - I_2h| / 3, Richardson for trapezoid
};

// Trapezoidal integral of exp(log_integrand) over the grid, evaluated in log
// space with a max shift so large negative exponents never underflow the
// result. Throws PartitionDivergedError when the integrand exceeds the
// overflow guard (exp argument > 700) or is not finite.
QuadratureResult log_trapezoid(
    const QuadratureGrid& grid,
    const std::function<double(const ParamVec&)>& log_integrand);

// Same, over precomputed node values in grid order (row-major for 2-D).
QuadratureResult log_trapezoid_values(const QuadratureGrid& grid,
                                      const std::vector<double>& log_values);

// Nodes of the grid in the order log_trapezoid_values expects.
std::vector<ParamVec> grid_nodes(const QuadratureGrid& grid);

}  // namespace lsam
