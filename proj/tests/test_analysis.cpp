#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "sskinetic/analysis.hpp"
#include "sskinetic/initcond.hpp"

using namespace sskinetic;

TEST_SUITE("analysis") {

TEST_CASE("moments track a one-node shift of a compact field") {
  const VelocityGrid g = make_grid(8.0, 16);
  const ScalarField f = initcond::gmm(g);
  ScalarField shifted = ScalarField::Zero(g.size());
  for (int i1 = 0; i1 + 1 < g.n0; ++i1)
    for (int i2 = 0; i2 < g.n0; ++i2)
      for (int i3 = 0; i3 < g.n0; ++i3)
        shifted[g.flat(i1 + 1, i2, i3)] = f[g.flat(i1, i2, i3)];

  const auto m0 = analysis::moments(g, f);
  const auto m1 = analysis::moments(g, shifted);
  // The support sits well inside the box, so the dropped plane carries ~0.
  CHECK(std::abs(m1.mass - m0.mass) <= 1e-14);
  CHECK(std::abs(m1.momentum[0] - (m0.momentum[0] + g.h * m0.mass)) <= 1e-13);
  CHECK(std::abs(m1.momentum[1] - m0.momentum[1]) <= 1e-14);
  CHECK(std::abs(m1.momentum[2] - m0.momentum[2]) <= 1e-14);
  const Real expect_energy =
      m0.energy + g.h * m0.momentum[0] + 0.5 * g.h * g.h * m0.mass;
  CHECK(std::abs(m1.energy - expect_energy) <= 1e-13);
}

TEST_CASE("entropy of the uniform box is log of its volume") {
  const VelocityGrid g = make_grid(4.0, 12);
  const Real vol = 4.0 * 4.0 * 4.0;
  const ScalarField f = ScalarField::Constant(g.size(), 1.0 / vol);
  CHECK(std::abs(analysis::entropy(g, f) - std::log(vol)) <= 1e-12);
}

TEST_CASE("entropy obeys the scaling identity") {
  // S(2f) = 2 S(f) - 2 log(2) m(f) wherever the floor is inactive; floored
  // nodes carry mass <= f_min each, far below the tolerance.
  const VelocityGrid g = make_grid(8.0, 16);
  const ScalarField f = initcond::gmm(g);
  const Real s1 = analysis::entropy(g, f);
  const Real s2 = analysis::entropy(g, ScalarField(2.0 * f));
  const Real mass = analysis::moments(g, f).mass;
  CHECK(std::abs(s2 - (2.0 * s1 - 2.0 * std::log(2.0) * mass)) <= 1e-12);
}

TEST_CASE("relative errors vanish on coincident subsamples") {
  const VelocityGrid ref = make_grid(8.0, 16);
  const VelocityGrid coarse = make_grid(8.0, 8);
  const ScalarField fr = initcond::maxwellian(ref, 0.4);
  ScalarField fc(coarse.size());
  for (int i1 = 0; i1 < 8; ++i1)
    for (int i2 = 0; i2 < 8; ++i2)
      for (int i3 = 0; i3 < 8; ++i3)
        fc[coarse.flat(i1, i2, i3)] = fr[ref.flat(2 * i1, 2 * i2, 2 * i3)];

  const auto zero = analysis::relative_errors(coarse, fc, ref, fr);
  CHECK(zero.l1 == 0.0);
  CHECK(zero.l2 == 0.0);
  CHECK(zero.linf == 0.0);

  const auto eps = analysis::relative_errors(coarse, ScalarField(fc * (1.0 + 1e-6)),
                                             ref, fr);
  CHECK(std::abs(eps.l1 - 1e-6) <= 1e-12);
  CHECK(std::abs(eps.l2 - 1e-6) <= 1e-12);
  CHECK(std::abs(eps.linf - 1e-6) <= 1e-12);
}

TEST_CASE("relative errors reject non-nested grids") {
  const VelocityGrid ref = make_grid(8.0, 16);
  const VelocityGrid bad_n = make_grid(8.0, 6);  // 16 % 6 != 0
  const VelocityGrid bad_l = make_grid(6.0, 8);
  const ScalarField fr = ScalarField::Zero(ref.size());
  CHECK_THROWS_AS(analysis::relative_errors(bad_n, ScalarField::Zero(bad_n.size()),
                                            ref, fr),
                  std::invalid_argument);
  CHECK_THROWS_AS(analysis::relative_errors(bad_l, ScalarField::Zero(bad_l.size()),
                                            ref, fr),
                  std::invalid_argument);
}

TEST_CASE("radial profile of a constant field") {
  const VelocityGrid g = make_grid(8.0, 12);
  const ScalarField f = ScalarField::Constant(g.size(), 3.25);
  const auto bins = analysis::radial_profile(g, f);
  REQUIRE(!bins.empty());
  std::int64_t total = 0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    CHECK(bins[k].mean == 3.25);
    CHECK(bins[k].count > 0);
    // Center of an occupied bin: odd multiple of w/2.
    const Real ratio = bins[k].r / (0.5 * g.h);
    CHECK(std::abs(ratio - std::round(ratio)) <= 1e-12);
    total += bins[k].count;
  }
  CHECK(total == g.size());
}

TEST_CASE("radial profile of a maxwellian decreases outward") {
  const VelocityGrid g = make_grid(8.0, 16);
  const auto bins = analysis::radial_profile(g, initcond::maxwellian(g, 0.4));
  REQUIRE(bins.size() >= 5);
  for (std::size_t k = 1; k < bins.size(); ++k)
    CHECK(bins[k].mean < bins[k - 1].mean);
}

TEST_CASE("cubic symmetry deviation of a linear field is exact") {
  const VelocityGrid g = make_grid(8.0, 8);  // coords -4..3, h = 1
  ScalarField f(g.size());
  for (int i1 = 0; i1 < 8; ++i1)
    for (int i2 = 0; i2 < 8; ++i2)
      for (int i3 = 0; i3 < 8; ++i3)
        f[g.flat(i1, i2, i3)] = g.coord(i1);
  // Worst image pairs x with -x (or +-z) on the subgrid: |3 - (-3)| / 4.
  CHECK(analysis::cubic_symmetry_deviation(g, f) == 1.5);
}

TEST_CASE("cubic symmetry deviation is zero for radial fields") {
  const VelocityGrid g = make_grid(8.0, 16);
  CHECK(analysis::cubic_symmetry_deviation(g, initcond::maxwellian(g, 0.3)) ==
        0.0);
}

TEST_CASE("coupling parameter and characteristic scales") {
  analysis::PhysicalParams p;
  p.density = 1e30;
  p.charge = 1.602176634e-19;
  p.mass = 1.6726e-27;
  p.temperature = 1.171e5;

  CHECK(std::abs(analysis::coupling_parameter(p) - 2.30) <= 0.02 * 2.30);

  const auto s = analysis::characteristic_scales(p);
  CHECK(std::abs(s.length - 6.204e-11) <= 0.01 * 6.204e-11);
  CHECK(std::abs(s.plasma_frequency - 1.3166e15) <= 0.01 * 1.3166e15);
  CHECK(std::abs(s.velocity - 8.168e4) <= 0.01 * 8.168e4);
  CHECK(std::abs(s.time - 7.595e-16) <= 0.01 * 7.595e-16);
  CHECK(std::abs(s.velocity - s.length * s.plasma_frequency) <=
        1e-12 * s.velocity);
  CHECK(std::abs(s.time * s.plasma_frequency - 1.0) <= 1e-12);
}

TEST_CASE("coupling scales inversely with temperature") {
  analysis::PhysicalParams p;
  p.density = 3.7e28;
  p.charge = 1.602176634e-19;
  p.mass = 9.1093837015e-31;
  p.temperature = 5e4;
  analysis::PhysicalParams hot = p;
  hot.temperature = 2.0 * p.temperature;
  const Real ratio = analysis::coupling_parameter(p) /
                     analysis::coupling_parameter(hot);
  CHECK(std::abs(ratio - 2.0) <= 1e-12);
}

}  // TEST_SUITE
