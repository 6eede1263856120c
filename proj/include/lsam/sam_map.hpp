#pragma once

#include <cstdint>

#include "lsam/landscapes.hpp"
#include "lsam/quadrature.hpp"

namespace lsam {

// Dimension-aware default for the stabilizer gamma: tiny enough that the
// perturbation matches unstabilized SAM away from critical points.
double default_sam_gamma(int dim);

struct SamParams {
  double rho = 0.0;     // perturbation radius, >= 0
  double gamma = 1e-8;  // stabilizer, > 0 strictly

  void validate() const;  // throws ConfigError
};

// Stabilized perturbation map T(x) = x + rho * g / (||g|| + gamma) with
// g = grad f(x). The shift never exceeds rho; rho = 0 returns x unchanged.
ParamVec lookback_map(const ObjectiveSpec& obj, const SamParams& p,
                      const ParamVec& x);

// SAM surrogate loss f(T(x)).
double sam_loss(const ObjectiveSpec& obj, const SamParams& p,
                const ParamVec& x);

// Single-sample SAM stochastic gradient: the perturbation direction and the
// outer gradient reuse the same noise realization (same seed).
ParamVec sam_stochastic_grad(const ObjectiveSpec& obj, const SamParams& p,
                             const ParamVec& x, std::uint64_t seed);

// Unnormalized SAM Boltzmann density exp(-f(T(x))), and its log.
double sam_log_density_unnormalized(const ObjectiveSpec& obj,
                                    const SamParams& p, const ParamVec& x);
double sam_density_unnormalized(const ObjectiveSpec& obj, const SamParams& p,
                                const ParamVec& x);

// Partition constant Z = integral of exp(-f(T(x))) by trapezoidal quadrature,
// dim 1 or 2 only. The grid must cover the support: the boundary integrand is
// checked against the interior maximum. Throws PartitionDivergedError when
// the overflow guard trips.
QuadratureResult sam_partition_1d2d(const ObjectiveSpec& obj,
                                    const SamParams& p,
                                    const QuadratureGrid& grid);

}  // namespace lsam
