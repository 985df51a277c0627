#include <cstdio>
#include <random>

#include "doctest.h"
#include "sskinetic/field_io.hpp"
#include "sskinetic/grid.hpp"

using namespace sskinetic;

namespace {

ScalarField random_field(const VelocityGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  ScalarField f(g.size());
  for (std::int64_t i = 0; i < f.size(); ++i) f[i] = u(rng);
  return f;
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("make_grid accepts even sizes and rejects bad input") {
  const VelocityGrid g = make_grid(8.0, 16);
  CHECK(g.h == 0.5);
  CHECK(g.size() == 16 * 16 * 16);
  // Even n0 puts the origin on a node.
  const Vec3 origin = g.node(8, 8, 8);
  CHECK(origin.norm() == 0.0);

  const VelocityGrid g64 = make_grid(8.0, 64);
  CHECK(g64.h == 1.0 / 8);

  CHECK_THROWS_AS(make_grid(8.0, 15), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(-1.0, 16), std::invalid_argument);
}

TEST_CASE("node index round trip") {
  const VelocityGrid g = make_grid(6.0, 6);
  for (int i1 = 0; i1 < 6; ++i1)
    for (int i2 = 0; i2 < 6; ++i2)
      for (int i3 = 0; i3 < 6; ++i3) {
        const std::int64_t k = g.flat(i1, i2, i3);
        CHECK(g.node(k) == g.node(i1, i2, i3));
      }
}

TEST_CASE("d_minus of constant field vanishes with CopyBoundary ghosts") {
  const VelocityGrid g = make_grid(4.0, 8);
  const ScalarField f = ScalarField::Constant(g.size(), 3.25);
  const VectorField grad = d_minus(g, f, CopyBoundary{});
  for (int d = 0; d < 3; ++d) CHECK(grad.comp[d].abs().maxCoeff() == 0.0);
}

TEST_CASE("d_minus with Analytic ghosts is exact on quadratics") {
  const VelocityGrid g = make_grid(4.0, 8);
  ScalarField f(g.size());
  for (std::int64_t k = 0; k < g.size(); ++k) f[k] = g.node(k).squaredNorm();
  const Analytic ghost{[](const Vec3& v) { return v.squaredNorm(); }};
  const VectorField grad = d_minus(g, f, ghost);
  Real worst = 0;
  for (std::int64_t k = 0; k < g.size(); ++k) {
    const Vec3 v = g.node(k);
    for (int d = 0; d < 3; ++d)
      worst = std::max(worst, std::abs(grad.comp[d][k] - 2 * v[d]));
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("d_minus of a single-node indicator hits the axis neighbors") {
  const VelocityGrid g = make_grid(4.0, 8);
  ScalarField f = ScalarField::Zero(g.size());
  const int c = 4;
  f[g.flat(c, c, c)] = 1.0;
  const VectorField grad = d_minus(g, f, ZeroExtend{});
  const Real stencil = 1 / (2 * g.h);
  CHECK(grad.comp[0][g.flat(c - 1, c, c)] == doctest::Approx(stencil));
  CHECK(grad.comp[0][g.flat(c + 1, c, c)] == doctest::Approx(-stencil));
  CHECK(grad.comp[1][g.flat(c, c - 1, c)] == doctest::Approx(stencil));
  CHECK(grad.comp[2][g.flat(c, c, c + 1)] == doctest::Approx(-stencil));
  CHECK(grad.comp[0][g.flat(c, c, c)] == 0.0);
  // Nothing outside the six axis neighbors.
  int nonzero = 0;
  for (int d = 0; d < 3; ++d)
    for (std::int64_t k = 0; k < g.size(); ++k)
      if (grad.comp[d][k] != 0) ++nonzero;
  CHECK(nonzero == 6);
}

TEST_CASE("d_plus is the exact negative adjoint of d_minus under ZeroExtend") {
  const VelocityGrid g = make_grid(5.0, 10);
  const ScalarField phi = random_field(g, 11);
  const ScalarField psi = random_field(g, 22);
  VectorField xi = d_minus(g, psi, ZeroExtend{});
  const Real lhs = inner(g, phi, d_plus(g, xi, ZeroExtend{}));
  const Real rhs = -inner(g, d_minus(g, phi, ZeroExtend{}), xi);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

  // Also for a generic (non-gradient) vector field.
  VectorField w;
  w.comp[0] = random_field(g, 33);
  w.comp[1] = random_field(g, 44);
  w.comp[2] = random_field(g, 55);
  const Real lhs2 = inner(g, phi, d_plus(g, w, ZeroExtend{}));
  const Real rhs2 = -inner(g, d_minus(g, phi, ZeroExtend{}), w);
  CHECK(lhs2 == doctest::Approx(rhs2).epsilon(1e-12));
}

TEST_CASE("divergence sum telescopes to zero when p vanishes near the boundary") {
  const VelocityGrid g = make_grid(5.0, 10);
  VectorField p;
  p.comp[0] = random_field(g, 7);
  p.comp[1] = random_field(g, 8);
  p.comp[2] = random_field(g, 9);
  // Zero the two outermost layers.
  for (int i1 = 0; i1 < g.n0; ++i1)
    for (int i2 = 0; i2 < g.n0; ++i2)
      for (int i3 = 0; i3 < g.n0; ++i3) {
        const bool inner_node = i1 >= 2 && i1 < g.n0 - 2 && i2 >= 2 &&
                                i2 < g.n0 - 2 && i3 >= 2 && i3 < g.n0 - 2;
        if (inner_node) continue;
        for (int d = 0; d < 3; ++d) p.comp[d][g.flat(i1, i2, i3)] = 0;
      }
  const ScalarField div = d_plus(g, p, ZeroExtend{});
  const Real mass_rate = g.h * g.h * g.h * div.sum();
  CHECK(std::abs(mass_rate) <= 1e-13);
}

TEST_CASE("constant vector field has zero interior divergence, ghost effects at boundary") {
  const VelocityGrid g = make_grid(4.0, 8);
  VectorField p;
  for (int d = 0; d < 3; ++d) p.comp[d] = ScalarField::Constant(g.size(), 1.0);
  const ScalarField div = d_plus(g, p, ZeroExtend{});
  for (int i1 = 1; i1 < g.n0 - 1; ++i1)
    for (int i2 = 1; i2 < g.n0 - 1; ++i2)
      for (int i3 = 1; i3 < g.n0 - 1; ++i3)
        CHECK(div[g.flat(i1, i2, i3)] == 0.0);
  CHECK(div[g.flat(0, 4, 4)] != 0.0);
}

TEST_CASE("field io round trips csv and binary") {
  const VelocityGrid g = make_grid(4.0, 6);
  const ScalarField f = random_field(g, 99);
  for (const char* name : {"/tmp/ssk_field_test.csv", "/tmp/ssk_field_test.f64"}) {
    write_field(name, g, f, 0.75);
    const FieldSnapshot snap = read_field(name);
    CHECK(snap.grid.n0 == g.n0);
    CHECK(snap.grid.L == g.L);
    CHECK(snap.time == 0.75);
    CHECK((snap.values - f).abs().maxCoeff() == 0.0);
    std::remove(name);
  }
}

TEST_CASE("field io rejects malformed input") {
  CHECK_THROWS_AS(read_field("/tmp/ssk_missing_file.csv"), std::runtime_error);
  {
    std::FILE* fp = std::fopen("/tmp/ssk_bad_header.csv", "w");
    std::fputs("not json\n1.0\n", fp);
    std::fclose(fp);
  }
  CHECK_THROWS_AS(read_field("/tmp/ssk_bad_header.csv"), std::runtime_error);
  std::remove("/tmp/ssk_bad_header.csv");
}

}  // TEST_SUITE
