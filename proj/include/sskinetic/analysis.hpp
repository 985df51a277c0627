#pragma once

#include <vector>

#include "sskinetic/grid.hpp"
#include "sskinetic/types.hpp"

namespace sskinetic::analysis {

/// Discrete moments: mass = h^3 sum f, momentum_d = h^3 sum v_d f,
/// energy = (1/2) h^3 sum |v|^2 f. Compensated summation throughout.
struct Moments {
  Real mass = 0;
  Vec3 momentum = Vec3::Zero();
  Real energy = 0;
};

Moments moments(const VelocityGrid& g, const ScalarField& f);

/// Discrete entropy S = -h^3 sum f log(max(f, f_min)).
Real entropy(const VelocityGrid& g, const ScalarField& f,
             Real f_min = default_f_min);

/// Relative l1/l2/linf errors of f against a reference field sampled on a
/// nested refinement of the same box: ref.n0 must be an integer multiple of
/// coarse.n0 (same L), and the comparison runs over the coincident nodes
/// (every ratio-th reference node). Non-nested grids are rejected with
/// std::invalid_argument.
struct RelativeErrors {
  Real l1 = 0;
  Real l2 = 0;
  Real linf = 0;
};

RelativeErrors relative_errors(const VelocityGrid& coarse,
                               const ScalarField& f, const VelocityGrid& ref,
                               const ScalarField& f_ref);

/// Shell means of f over bins [k w, (k+1) w) of |v|; w defaults to h when
/// bin_width <= 0. Empty bins are omitted; r is the bin center.
struct RadialBin {
  Real r = 0;
  Real mean = 0;
  std::int64_t count = 0;
};

std::vector<RadialBin> radial_profile(const VelocityGrid& g,
                                      const ScalarField& f,
                                      Real bin_width = 0);

/// max over the 48 signed-permutation symmetries R of ||f(R v) - f(v)||_inf
/// relative to ||f||_inf. The outermost index-0 planes have no mirror node,
/// so the comparison runs over the sign-closed subgrid i_d in [1, n0).
Real cubic_symmetry_deviation(const VelocityGrid& g, const ScalarField& f);

/// SI plasma state: number density [1/m^3], particle charge [C] and mass
/// [kg], temperature [K].
struct PhysicalParams {
  Real density = 0;
  Real charge = 0;
  Real mass = 0;
  Real temperature = 0;
};

/// Coulomb coupling Gamma = q^2 / (4 pi eps0 kB T a) with the Wigner-Seitz
/// radius a = (3 / (4 pi n))^(1/3).
Real coupling_parameter(const PhysicalParams& p);

/// a, omega_p = sqrt(n q^2 / (m eps0)), v0 = a omega_p, t0 = 1 / omega_p.
struct CharacteristicScales {
  Real length = 0;
  Real plasma_frequency = 0;
  Real velocity = 0;
  Real time = 0;
};

CharacteristicScales characteristic_scales(const PhysicalParams& p);

}  // namespace sskinetic::analysis
