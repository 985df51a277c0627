#pragma once

#include "sskinetic/grid.hpp"
#include "sskinetic/kernel.hpp"

namespace sskinetic {

/**
 * Reference quadratic-cost evaluator of the collision flux
 *   p_i = h^3 sum_j omega(v_i, v_j) f_i f_j [G_i - G_j],
 * G = D^- log(max(f, f_min)) with copy-boundary ghosts. The j-sum includes
 * j = i under the kernel's zero-at-diagonal policy so that the fast
 * evaluator's convolution semantics match node for node. Accepts any pair
 * kernel; a tabulated path accelerates SSKernel without changing semantics.
 */
VectorField collision_flux_direct(const VelocityGrid& g, const ScalarField& f,
                                  const PairKernel& kernel,
                                  Real f_min = default_f_min);

/// D^+ (zero-extension ghosts) of the flux, with the flux forced to zero on
/// the outermost node layer first; mass then telescopes to zero exactly.
ScalarField collision_rhs_direct(const VelocityGrid& g, const ScalarField& f,
                                 const PairKernel& kernel,
                                 Real f_min = default_f_min);

/// (1/2) h^6 sum_ij f_i f_j [G_i - G_j]^T omega_ij [G_i - G_j], nonnegative
/// up to roundoff for admissible kernels; throws std::logic_error if the
/// accumulated value is negative beyond roundoff scale.
Real entropy_production_direct(const VelocityGrid& g, const ScalarField& f,
                               const PairKernel& kernel,
                               Real f_min = default_f_min);

/// Shared helper: D^- of log(max(f, f_min)) with copy-boundary ghosts.
VectorField grad_log_floored(const VelocityGrid& g, const ScalarField& f,
                             Real f_min);

}  // namespace sskinetic
