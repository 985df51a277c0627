#include "sskinetic/grid.hpp"

#include <stdexcept>

namespace sskinetic {

VelocityGrid make_grid(Real L, int n0) {
  if (!(L > 0)) throw std::invalid_argument("make_grid: L must be positive");
  if (n0 < 4 || n0 % 2 != 0)
    throw std::invalid_argument("make_grid: n0 must be even and >= 4");
  VelocityGrid g;
  g.L = L;
  g.n0 = n0;
  g.h = L / n0;
  return g;
}

namespace {

// Value of f at index (i1,i2,i3) where exactly one index may be out of range.
inline Real ghost_value(const VelocityGrid& g, const ScalarField& f,
                        const GhostPolicy& ghost, int i1, int i2, int i3) {
  const int n = g.n0;
  if (i1 >= 0 && i1 < n && i2 >= 0 && i2 < n && i3 >= 0 && i3 < n)
    return f[g.flat(i1, i2, i3)];
  if (std::holds_alternative<ZeroExtend>(ghost)) return 0;
  if (std::holds_alternative<CopyBoundary>(ghost)) {
    const int c1 = std::min(std::max(i1, 0), n - 1);
    const int c2 = std::min(std::max(i2, 0), n - 1);
    const int c3 = std::min(std::max(i3, 0), n - 1);
    return f[g.flat(c1, c2, c3)];
  }
  const auto& fn = std::get<Analytic>(ghost).fn;
  return fn(Vec3(g.coord(i1), g.coord(i2), g.coord(i3)));
}

}  // namespace

VectorField d_minus(const VelocityGrid& g, const ScalarField& f,
                    const GhostPolicy& ghost) {
  const int n = g.n0;
  const Real inv2h = 1 / (2 * g.h);
  VectorField out = VectorField::zero(g.size());
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3) {
        const std::int64_t k = g.flat(i1, i2, i3);
        out.comp[0][k] = (ghost_value(g, f, ghost, i1 + 1, i2, i3) -
                          ghost_value(g, f, ghost, i1 - 1, i2, i3)) *
                         inv2h;
        out.comp[1][k] = (ghost_value(g, f, ghost, i1, i2 + 1, i3) -
                          ghost_value(g, f, ghost, i1, i2 - 1, i3)) *
                         inv2h;
        out.comp[2][k] = (ghost_value(g, f, ghost, i1, i2, i3 + 1) -
                          ghost_value(g, f, ghost, i1, i2, i3 - 1)) *
                         inv2h;
      }
  return out;
}

ScalarField d_plus(const VelocityGrid& g, const VectorField& p,
                   const GhostPolicy& ghost) {
  const int n = g.n0;
  const Real inv2h = 1 / (2 * g.h);
  ScalarField out = ScalarField::Zero(g.size());
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3) {
        const std::int64_t k = g.flat(i1, i2, i3);
        out[k] = (ghost_value(g, p.comp[0], ghost, i1 + 1, i2, i3) -
                  ghost_value(g, p.comp[0], ghost, i1 - 1, i2, i3) +
                  ghost_value(g, p.comp[1], ghost, i1, i2 + 1, i3) -
                  ghost_value(g, p.comp[1], ghost, i1, i2 - 1, i3) +
                  ghost_value(g, p.comp[2], ghost, i1, i2, i3 + 1) -
                  ghost_value(g, p.comp[2], ghost, i1, i2, i3 - 1)) *
                 inv2h;
      }
  return out;
}

Real inner(const VelocityGrid& g, const ScalarField& a, const ScalarField& b) {
  return g.h * g.h * g.h * (a * b).sum();
}

Real inner(const VelocityGrid& g, const VectorField& a, const VectorField& b) {
  Real s = 0;
  for (int d = 0; d < 3; ++d) s += (a.comp[d] * b.comp[d]).sum();
  return g.h * g.h * g.h * s;
}

void zero_boundary_layer(const VelocityGrid& g, VectorField& p) {
  const int n = g.n0;
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3) {
        if (i1 != 0 && i1 != n - 1 && i2 != 0 && i2 != n - 1 && i3 != 0 &&
            i3 != n - 1)
          continue;
        const std::int64_t k = g.flat(i1, i2, i3);
        for (int d = 0; d < 3; ++d) p.comp[d][k] = 0;
      }
}

}  // namespace sskinetic
