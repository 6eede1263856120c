#include "lsam/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsam/errors.hpp"

namespace lsam {

namespace {

constexpr double kOverflowGuard = 700.0;  // exp(700) is near DBL_MAX

// log of the trapezoid weight for node index i on an n-point axis.
double log_axis_weight(int i, int n, double h) {
  const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
  return std::log(w);
}

// Log-sum-exp trapezoid over a subset of nodes selected by stride.
double log_trapz_strided(const QuadratureGrid& g,
                         const std::vector<double>& v, int stride) {
  const int d = g.dim();
  const int n0 = g.points[0];
  const int m0 = (n0 - 1) / stride + 1;
  const double h0 = g.spacing(0) * stride;

  double max_term = -std::numeric_limits<double>::infinity();
  auto term = [&](int flat, double logw) { return v[flat] + logw; };

  if (d == 1) {
    for (int i = 0; i < m0; ++i) {
      max_term = std::max(max_term, term(i * stride, log_axis_weight(i, m0, h0)));
    }
    if (!std::isfinite(max_term)) return max_term;
    double acc = 0.0;
    for (int i = 0; i < m0; ++i) {
      acc += std::exp(term(i * stride, log_axis_weight(i, m0, h0)) - max_term);
    }
    return max_term + std::log(acc);
  }

  const int n1 = g.points[1];
  const int m1 = (n1 - 1) / stride + 1;
  const double h1 = g.spacing(1) * stride;
  for (int i = 0; i < m0; ++i) {
    for (int j = 0; j < m1; ++j) {
      const double logw =
          log_axis_weight(i, m0, h0) + log_axis_weight(j, m1, h1);
      max_term = std::max(max_term, term(i * stride * n1 + j * stride, logw));
    }
  }
  if (!std::isfinite(max_term)) return max_term;
  double acc = 0.0;
  for (int i = 0; i < m0; ++i) {
    for (int j = 0; j < m1; ++j) {
      const double logw =
          log_axis_weight(i, m0, h0) + log_axis_weight(j, m1, h1);
      acc += std::exp(term(i * stride * n1 + j * stride, logw) - max_term);
    }
  }
  return max_term + std::log(acc);
}

}  // namespace

QuadratureGrid QuadratureGrid::uniform_1d(double lo, double hi, int points) {
  return QuadratureGrid{{lo}, {hi}, {points}};
}

QuadratureGrid QuadratureGrid::uniform_2d(double lo, double hi, int points) {
  return QuadratureGrid{{lo, lo}, {hi, hi}, {points, points}};
}

void QuadratureGrid::validate(int expected_dim) const {
  if (dim() < 1 || dim() > 2) {
    throw ConfigError("QuadratureGrid: only 1-D and 2-D grids are supported");
  }
  if (expected_dim > 0 && dim() != expected_dim) {
    throw ConfigError("QuadratureGrid: grid dimension " +
                      std::to_string(dim()) + " does not match objective " +
                      std::to_string(expected_dim));
  }
  if (hi.size() != lo.size() || points.size() != lo.size()) {
    throw ConfigError("QuadratureGrid: inconsistent axis descriptions");
  }
  for (int a = 0; a < dim(); ++a) {
    if (!(hi[a] > lo[a])) throw ConfigError("QuadratureGrid: hi must exceed lo");
    if (points[a] < 5) throw ConfigError("QuadratureGrid: too few points");
    if (points[a] % 2 == 0) {
      throw ConfigError(
          "QuadratureGrid: point counts must be odd (stride-2 refinement)");
    }
  }
}

std::vector<ParamVec> grid_nodes(const QuadratureGrid& grid) {
  std::vector<ParamVec> nodes;
  if (grid.dim() == 1) {
    nodes.reserve(grid.points[0]);
    for (int i = 0; i < grid.points[0]; ++i) {
      ParamVec p(1);
      p[0] = grid.lo[0] + i * grid.spacing(0);
      nodes.push_back(p);
    }
    return nodes;
  }
  nodes.reserve(static_cast<std::size_t>(grid.points[0]) * grid.points[1]);
  for (int i = 0; i < grid.points[0]; ++i) {
    for (int j = 0; j < grid.points[1]; ++j) {
      ParamVec p(2);
      p[0] = grid.lo[0] + i * grid.spacing(0);
      p[1] = grid.lo[1] + j * grid.spacing(1);
      nodes.push_back(p);
    }
  }
  return nodes;
}

QuadratureResult log_trapezoid_values(const QuadratureGrid& grid,
                                      const std::vector<double>& log_values) {
  grid.validate(0);
  std::size_t expected = grid.points[0];
  if (grid.dim() == 2) expected *= grid.points[1];
  if (log_values.size() != expected) {
    throw ConfigError("log_trapezoid_values: node count mismatch");
  }
  for (double v : log_values) {
    if (std::isnan(v) || v > kOverflowGuard) {
      throw PartitionDivergedError(
          "integrand exceeds the overflow guard; objective is likely "
          "non-integrable on this grid");
    }
  }

  QuadratureResult r;
  r.log_value = log_trapz_strided(grid, log_values, 1);
  const double log_coarse = log_trapz_strided(grid, log_values, 2);
  if (r.log_value > kOverflowGuard) {
    throw PartitionDivergedError("partition estimate overflows");
  }
  r.value = std::exp(r.log_value);
  r.error_estimate = std::abs(std::exp(log_coarse - r.log_value) - 1.0) *
                     r.value / 3.0;
  return r;
}

QuadratureResult log_trapezoid(
    const QuadratureGrid& grid,
    const std::function<double(const ParamVec&)>& log_integrand) {
  grid.validate(0);
  std::vector<double> values;
  for (const ParamVec& p : grid_nodes(grid)) values.push_back(log_integrand(p));
  return log_trapezoid_values(grid, values);
}

}  // namespace lsam
