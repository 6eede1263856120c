#pragma once

// Test-only oracles, independent of the library's own numerics: central
// finite differences and plain scalar quadrature.

#include <cmath>
#include <functional>

#include "lsam/landscapes.hpp"

namespace lsam::testing {

inline ParamVec fd_gradient(const std::function<double(const ParamVec&)>& f,
                            const ParamVec& x, double h = 1e-5) {
  ParamVec g(x.size());
  ParamVec p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    p[i] = xi + h;
    const double fp = f(p);
    p[i] = xi - h;
    const double fm = f(p);
    p[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Plain scalar trapezoid, no log-space tricks.
inline double trapezoid_1d(const std::function<double(double)>& f, double lo,
                           double hi, int n) {
  const double h = (hi - lo) / (n - 1);
  double acc = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n - 1; ++i) acc += f(lo + i * h);
  return acc * h;
}

}  // namespace lsam::testing
