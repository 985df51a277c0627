#include "sskinetic/initcond.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "sskinetic/reduce.hpp"

namespace sskinetic::initcond {
namespace {

// Summing the squared components in ascending order makes radial samples
// bitwise equal across the 48 signed-permutation images of a node.
Real sorted_r2(Real x, Real y, Real z) {
  Real a = x * x;
  Real b = y * y;
  Real c = z * z;
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  return (a + b) + c;
}

Real gmm_axis_factor(Real x) {
  const Real inv_width = Real(1) / Real(0.057);
  const Real p = x - Real(0.34);
  const Real q = x + Real(0.34);
  return std::exp(-p * p * inv_width) + std::exp(-q * q * inv_width);
}

template <class Density>
ScalarField sample_nodes(const VelocityGrid& g, Density&& density) {
  ScalarField f(g.size());
  for (int i1 = 0; i1 < g.n0; ++i1) {
    const Real x = g.coord(i1);
    for (int i2 = 0; i2 < g.n0; ++i2) {
      const Real y = g.coord(i2);
      std::int64_t at = g.flat(i1, i2, 0);
      for (int i3 = 0; i3 < g.n0; ++i3, ++at) f[at] = density(x, y, g.coord(i3));
    }
  }
  return f;
}

}  // namespace

Real gmm_density(const Vec3& v) {
  Real a = gmm_axis_factor(v[0]);
  Real b = gmm_axis_factor(v[1]);
  Real c = gmm_axis_factor(v[2]);
  // Ordered product, same orbit-invariance rationale as sorted_r2.
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  return Real(1.65) * ((a * b) * c);
}

Real rm_density(Real r2) {
  const Real cosv = std::cos(Real(7.07) * r2);
  return Real(1.254) * std::exp(Real(-3.535) * r2) * cosv * cosv;
}

Real maxwellian_density(Real r2, Real temperature) {
  const Real two_pi_t = Real(2) * std::numbers::pi_v<Real> * temperature;
  return std::exp(-r2 / (Real(2) * temperature)) /
         (two_pi_t * std::sqrt(two_pi_t));
}

Real bimaxwellian_density(const Vec3& v, Real t_axis, Real t_perp, int axis) {
  const Real pi = std::numbers::pi_v<Real>;
  const Real va2 = v[axis] * v[axis];
  const Real vp2 = v.squaredNorm() - va2;
  const Real z = std::sqrt(Real(8) * pi * pi * pi * t_axis * t_perp * t_perp);
  return std::exp(-va2 / (Real(2) * t_axis) - vp2 / (Real(2) * t_perp)) / z;
}

ScalarField gmm(const VelocityGrid& g) {
  if (g.L < Real(8) * (Real(1) - Real(1e-12)))
    throw std::invalid_argument("gmm: grid must cover [-4,4]^3 (L >= 8)");
  ScalarField f = sample_nodes(
      g, [](Real x, Real y, Real z) { return gmm_density(Vec3(x, y, z)); });
  normalize_mass(g, f);
  return f;
}

ScalarField rm(const VelocityGrid& g) {
  ScalarField f = sample_nodes(
      g, [](Real x, Real y, Real z) { return rm_density(sorted_r2(x, y, z)); });
  normalize_mass(g, f);
  return f;
}

ScalarField maxwellian(const VelocityGrid& g, Real temperature) {
  if (!(temperature > 0))
    throw std::invalid_argument("maxwellian: temperature must be positive");
  ScalarField f = sample_nodes(g, [temperature](Real x, Real y, Real z) {
    return maxwellian_density(sorted_r2(x, y, z), temperature);
  });
  normalize_mass(g, f);
  return f;
}

ScalarField bimaxwellian(const VelocityGrid& g, Real t_axis, Real t_perp,
                         int axis) {
  if (!(t_axis > 0) || !(t_perp > 0))
    throw std::invalid_argument("bimaxwellian: temperatures must be positive");
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("bimaxwellian: axis must be 0, 1, or 2");
  ScalarField f = sample_nodes(g, [=](Real x, Real y, Real z) {
    return bimaxwellian_density(Vec3(x, y, z), t_axis, t_perp, axis);
  });
  normalize_mass(g, f);
  return f;
}

ScalarField uniform_ball(const VelocityGrid& g, Real radius) {
  if (!(radius > 0))
    throw std::invalid_argument("uniform_ball: radius must be positive");
  const Real r2max = radius * radius;
  ScalarField f = sample_nodes(g, [r2max](Real x, Real y, Real z) {
    return sorted_r2(x, y, z) <= r2max ? Real(1) : Real(0);
  });
  if (!(f.maxCoeff() > 0))
    throw std::invalid_argument("uniform_ball: no grid node inside the ball");
  normalize_mass(g, f);
  return f;
}

Real normalize_mass(const VelocityGrid& g, ScalarField& f) {
  const Real mass = g.h * g.h * g.h * kahan_sum(f);
  if (!(mass > 0) || !std::isfinite(mass))
    throw std::invalid_argument("normalize_mass: mass must be positive");
  f /= mass;
  return mass;
}

}  // namespace sskinetic::initcond
