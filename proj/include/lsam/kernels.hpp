#pragma once

#include <functional>
#include <optional>

#include "lsam/param_vec.hpp"
#include "lsam/quadrature.hpp"

namespace lsam {

// Tail growth class of phi, gating which kernels may enter densities. A
// kernel whose exp(-phi) is not integrable carries kNone and is rejected.
enum class TailClass { kPolyExpGrowth, kSuperLogGrowth, kNone };

// Stationary kernel k(x, y) = phi(x - y).
struct KernelSpec {
  std::function<double(const ParamVec&)> phi;
  std::function<ParamVec(const ParamVec&)> grad_phi;
  TailClass tail_class = TailClass::kNone;
  // integral of exp(-phi) over R^d when known in closed form; stationarity
  // makes it independent of the anchor point.
  std::optional<double> normalizer_Z;
};

// phi(z) = ||z||^2 / (2 s^2); normalizer (2 pi s^2)^{d/2}.
KernelSpec gaussian_kernel(double s, int dim);

// Exponential-power family phi(z) = lambda ||z||^alpha (Gaussian when
// alpha = 2 and lambda = 1/(2 s^2)). Normalizer left unknown; computed by
// quadrature where needed. Throws ConfigError for alpha <= 0 or lambda <= 0.
KernelSpec exp_power_kernel(double lambda, double alpha, int dim);

// log of the kernel normalizer: closed form when available, otherwise
// trapezoidal quadrature of exp(-phi) over [-radius, radius]^dim.
double kernel_log_normalizer(const KernelSpec& kern, int dim, double radius,
                             int points = 4001);

}  // namespace lsam
