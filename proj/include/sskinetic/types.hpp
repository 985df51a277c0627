#pragma once

#include <cstdint>
#include <Eigen/Dense>

namespace sskinetic {

using Real = double;
using Vec3 = Eigen::Matrix<Real, 3, 1>;
using Mat3 = Eigen::Matrix<Real, 3, 3>;
using ArrayX = Eigen::Array<Real, Eigen::Dynamic, 1>;

// Densities below this value are floored before taking logarithms.
inline constexpr Real default_f_min = 1e-16;

}  // namespace sskinetic
