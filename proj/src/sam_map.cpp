#include "lsam/sam_map.hpp"

#include <algorithm>
#include <cmath>

#include "lsam/errors.hpp"

namespace lsam {

double default_sam_gamma(int dim) {
  return 1e-12 * std::sqrt(static_cast<double>(dim)) + 1e-8;
}

void SamParams::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("SamParams: gamma must be > 0");
  if (rho < 0.0) throw ConfigError("SamParams: rho must be >= 0");
}

ParamVec lookback_map(const ObjectiveSpec& obj, const SamParams& p,
                      const ParamVec& x) {
  if (p.rho == 0.0) return x;
  ParamVec g = obj.grad(x);
  return x + (p.rho / (g.norm() + p.gamma)) * g;
}

double sam_loss(const ObjectiveSpec& obj, const SamParams& p,
                const ParamVec& x) {
  return obj.eval(lookback_map(obj, p, x));
}

ParamVec sam_stochastic_grad(const ObjectiveSpec& obj, const SamParams& p,
                             const ParamVec& x, std::uint64_t seed) {
  if (p.rho == 0.0) return obj.stochastic_grad(x, seed);
  ParamVec g = obj.stochastic_grad(x, seed);
  ParamVec shifted = x + (p.rho / (g.norm() + p.gamma)) * g;
  return obj.stochastic_grad(shifted, seed);
}

double sam_log_density_unnormalized(const ObjectiveSpec& obj,
                                    const SamParams& p, const ParamVec& x) {
  return -sam_loss(obj, p, x);
}

double sam_density_unnormalized(const ObjectiveSpec& obj, const SamParams& p,
                                const ParamVec& x) {
  return std::exp(sam_log_density_unnormalized(obj, p, x));
}

namespace {

// The grid covers the support when the boundary integrand is at least
// exp(-23) ~ 1e-10 below the interior peak.
void check_support_coverage(const QuadratureGrid& grid,
                            const std::vector<double>& log_values) {
  double interior_max = -1e300;
  double boundary_max = -1e300;
  const int n0 = grid.points[0];
  const int n1 = grid.dim() == 2 ? grid.points[1] : 1;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const double v = log_values[static_cast<std::size_t>(i) * n1 + j];
      const bool edge = i == 0 || i == n0 - 1 ||
                        (grid.dim() == 2 && (j == 0 || j == n1 - 1));
      if (edge) {
        boundary_max = std::max(boundary_max, v);
      } else {
        interior_max = std::max(interior_max, v);
      }
    }
  }
  if (boundary_max > interior_max - 23.0) {
    throw ConfigError(
        "quadrature grid does not cover the effective support of the "
        "density (boundary mass too large)");
  }
}

}  // namespace

QuadratureResult sam_partition_1d2d(const ObjectiveSpec& obj,
                                    const SamParams& p,
                                    const QuadratureGrid& grid) {
  p.validate();
  if (obj.dim != 1 && obj.dim != 2) {
    throw ConfigError("sam_partition_1d2d: objective dimension must be 1 or 2");
  }
  grid.validate(obj.dim);
  std::vector<double> log_values;
  for (const ParamVec& node : grid_nodes(grid)) {
    log_values.push_back(sam_log_density_unnormalized(obj, p, node));
  }
  // Overflow guard first: an unbounded-below objective is a divergence, not
  // a too-small grid.
  for (double v : log_values) {
    if (std::isnan(v) || v > 700.0) {
      throw PartitionDivergedError(
          "partition integrand exceeds the overflow guard; objective is "
          "likely unbounded below");
    }
  }
  check_support_coverage(grid, log_values);
  return log_trapezoid_values(grid, log_values);
}

}  // namespace lsam
