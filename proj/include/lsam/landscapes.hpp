#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lsam/param_vec.hpp"

namespace lsam {

enum class BasinLabel { kDeepSharp, kWideShallow, kWideDeep };

const char* to_string(BasinLabel label);

struct Minimum {
  ParamVec location;
  BasinLabel basin;
};

// A differentiable test objective with exact gradient, a seeded
// stochastic-gradient oracle, and whatever constants are known for it.
//
// The stochastic oracle is a pure function of (point, seed): calling it twice
// with the same seed replays the same noise realization, which is what lets
// SAM evaluate the perturbation direction and the outer gradient on one
// sample.
struct ObjectiveSpec {
  int dim = 0;
  std::function<double(const ParamVec&)> eval;
  std::function<ParamVec(const ParamVec&)> grad;
  std::function<ParamVec(const ParamVec&, std::uint64_t)> stochastic_grad;
  std::optional<double> smoothness_L;
  double noise_sigma = 0.0;
  std::optional<double> grad_norm_C;
  std::vector<Minimum> minima_catalog;
};

// Separable quadratic f(x) = 1/2 sum_i h_i x_i^2 with additive isotropic
// Gaussian gradient noise of total variance noise_sigma^2. Throws ConfigError
// on a nonpositive curvature component.
ObjectiveSpec make_quadratic(int dim, const ParamVec& hessian_diag,
                             double noise_sigma);

// 1-D double well f(x) = (x^2 - 1)^2, minima at +-1.
ObjectiveSpec make_double_well(double noise_sigma = 0.0);

// 2-D landscape with exactly three local minima, one per basin label:
// negated Gaussian bumps over a confining quadratic. Bump geometry is fixed
// in source; the seed only tags the stochastic-gradient noise stream.
ObjectiveSpec make_basin_landscape(std::uint64_t seed,
                                   double noise_sigma = 0.5);

// One-hidden-layer tanh regression network, least squares over a fixed
// synthetic dataset. Exact gradient via reverse-mode accumulation; the
// stochastic oracle draws a with-replacement minibatch by seed. minibatch
// <= 0 or >= samples means the full dataset is used, in which case the
// stochastic gradient equals the exact one.
ObjectiveSpec make_mlp_regression(int hidden, int samples, std::uint64_t seed,
                                  int minibatch = 32);

// Basin membership of a query point: run full-gradient descent and return the
// index of the nearest cataloged minimum. Deterministic.
std::size_t classify_basin(const ObjectiveSpec& obj, const ParamVec& query,
                           int descent_steps = 10000);

// Effective (C4) bound on a confinement ball of radius R:
// C = L * R + sigma * sqrt(d).
double effective_grad_bound(const ObjectiveSpec& obj, double radius);

}  // namespace lsam
