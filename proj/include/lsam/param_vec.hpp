#pragma once

#include <Eigen/Core>

namespace lsam {

// Dense real parameter vector. Dimension is fixed per experiment; all
// arithmetic requires matching dimensions (enforced by Eigen).
using ParamVec = Eigen::VectorXd;

inline bool all_finite(const ParamVec& v) { return v.allFinite(); }

}  // namespace lsam
