#pragma once

#include <array>
#include <functional>
#include <variant>

#include "sskinetic/types.hpp"

namespace sskinetic {

/**
 * Uniform cubic velocity grid on [-L/2, L/2)^3.
 *
 * Node k of axis d sits at v_d = -L/2 + k*h with h = L/n0, k = 0..n0-1.
 * n0 must be even (the origin is then a node) and at least 4.
 * Fields are flat arrays of size n0^3 with the third index fastest:
 * flat = (i1*n0 + i2)*n0 + i3.
 */
struct VelocityGrid {
  Real L = 0;
  int n0 = 0;
  Real h = 0;

  std::int64_t size() const { return std::int64_t(n0) * n0 * n0; }

  std::int64_t flat(int i1, int i2, int i3) const {
    return (std::int64_t(i1) * n0 + i2) * n0 + i3;
  }

  Real coord(int i) const { return -L / 2 + i * h; }

  Vec3 node(int i1, int i2, int i3) const {
    return Vec3(coord(i1), coord(i2), coord(i3));
  }

  Vec3 node(std::int64_t flat_index) const {
    const int i3 = int(flat_index % n0);
    const int i2 = int((flat_index / n0) % n0);
    const int i1 = int(flat_index / (std::int64_t(n0) * n0));
    return node(i1, i2, i3);
  }
};

/// Throws std::invalid_argument unless L > 0 and n0 is even and >= 4.
VelocityGrid make_grid(Real L, int n0);

using ScalarField = ArrayX;

struct VectorField {
  std::array<ScalarField, 3> comp;

  static VectorField zero(std::int64_t n) {
    VectorField f;
    for (auto& c : f.comp) c = ScalarField::Zero(n);
    return f;
  }
};

/// Out-of-domain neighbor handling for the difference stencils.
struct ZeroExtend {};
struct CopyBoundary {};
struct Analytic {
  std::function<Real(const Vec3&)> fn;
};
using GhostPolicy = std::variant<ZeroExtend, CopyBoundary, Analytic>;

/**
 * Central-difference gradient, (D- f)_d = (f(v + h e_d) - f(v - h e_d)) / (2h).
 * D+ applied to a vector field is the matching divergence; the pair is an
 * exact adjoint under the h^3 inner product when both use zero-extension
 * ghosts: <phi, D+ xi> = -<D- phi, xi>.
 */
VectorField d_minus(const VelocityGrid& g, const ScalarField& f,
                    const GhostPolicy& ghost = ZeroExtend{});

ScalarField d_plus(const VelocityGrid& g, const VectorField& p,
                   const GhostPolicy& ghost = ZeroExtend{});

/// h^3-weighted inner products.
Real inner(const VelocityGrid& g, const ScalarField& a, const ScalarField& b);
Real inner(const VelocityGrid& g, const VectorField& a, const VectorField& b);

/// Sets the outermost node layer (any index 0 or n0-1) of each component to zero.
void zero_boundary_layer(const VelocityGrid& g, VectorField& p);

}  // namespace sskinetic
