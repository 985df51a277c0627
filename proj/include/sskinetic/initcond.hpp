#pragma once

#include "sskinetic/grid.hpp"
#include "sskinetic/types.hpp"

namespace sskinetic::initcond {

/// Pointwise densities, unnormalized. Radial profiles take |v|^2.
Real gmm_density(const Vec3& v);
Real rm_density(Real r2);
Real maxwellian_density(Real r2, Real temperature);
Real bimaxwellian_density(const Vec3& v, Real t_axis, Real t_perp, int axis);

/// Grid samplers. Each samples its density at the nodes and renormalizes so
/// the discrete mass h^3 sum f equals one.
///
/// gmm requires the grid to cover [-4,4]^3 (L >= 8); bimaxwellian places
/// t_axis along `axis` in {0,1,2}; uniform_ball is the indicator of
/// |v| <= radius and requires radius > 0 with at least one node inside.
/// Violations throw std::invalid_argument.
ScalarField gmm(const VelocityGrid& g);
ScalarField rm(const VelocityGrid& g);
ScalarField maxwellian(const VelocityGrid& g, Real temperature);
ScalarField bimaxwellian(const VelocityGrid& g, Real t_axis, Real t_perp,
                         int axis);
ScalarField uniform_ball(const VelocityGrid& g, Real radius);

/// Rescales f in place to unit discrete mass; returns the original mass.
/// Throws std::invalid_argument if the mass is not positive and finite.
Real normalize_mass(const VelocityGrid& g, ScalarField& f);

}  // namespace sskinetic::initcond
