#include "lsam/kernels.hpp"

#include <cmath>
#include <numbers>

#include "lsam/errors.hpp"

namespace lsam {

KernelSpec gaussian_kernel(double s, int dim) {
  if (!(s > 0.0)) throw ConfigError("gaussian_kernel: s must be > 0");
  const double inv_s2 = 1.0 / (s * s);
  KernelSpec k;
  k.phi = [inv_s2](const ParamVec& z) { return 0.5 * inv_s2 * z.squaredNorm(); };
  k.grad_phi = [inv_s2](const ParamVec& z) -> ParamVec { return inv_s2 * z; };
  k.tail_class = TailClass::kPolyExpGrowth;
  k.normalizer_Z =
      std::pow(2.0 * std::numbers::pi * s * s, 0.5 * static_cast<double>(dim));
  return k;
}

KernelSpec exp_power_kernel(double lambda, double alpha, int dim) {
  (void)dim;
  if (!(lambda > 0.0)) throw ConfigError("exp_power_kernel: lambda must be > 0");
  if (!(alpha > 0.0)) throw ConfigError("exp_power_kernel: alpha must be > 0");
  KernelSpec k;
  k.phi = [lambda, alpha](const ParamVec& z) {
    return lambda * std::pow(z.norm(), alpha);
  };
  k.grad_phi = [lambda, alpha](const ParamVec& z) -> ParamVec {
    const double r = z.norm();
    if (r == 0.0) return ParamVec::Zero(z.size());
    return (lambda * alpha * std::pow(r, alpha - 2.0)) * z;
  };
  k.tail_class = TailClass::kPolyExpGrowth;
  return k;
}

double kernel_log_normalizer(const KernelSpec& kern, int dim, double radius,
                             int points) {
  if (kern.normalizer_Z) return std::log(*kern.normalizer_Z);
  QuadratureGrid grid =
      dim == 1 ? QuadratureGrid::uniform_1d(-radius, radius, points)
               : QuadratureGrid::uniform_2d(-radius, radius, points);
  return log_trapezoid(grid, [&](const ParamVec& z) { return -kern.phi(z); })
      .log_value;
}

}  // namespace lsam
