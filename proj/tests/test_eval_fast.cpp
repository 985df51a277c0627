#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "sskinetic/eval_direct.hpp"
#include "sskinetic/eval_fast.hpp"
#include "sskinetic/initcond.hpp"
#include "sskinetic/reduce.hpp"
#include "sskinetic/term_table.hpp"
#include "test_helpers.hpp"

using namespace sskinetic;
using ssktest::gmm_field;

namespace {

Real rel_linf(const ScalarField& a, const ScalarField& b) {
  const Real scale = std::max<Real>(b.abs().maxCoeff(), 1e-30);
  return (a - b).abs().maxCoeff() / scale;
}

Real flux_rel_linf(const VectorField& a, const VectorField& b) {
  Real scale = 1e-30, diff = 0;
  for (int d = 0; d < 3; ++d) {
    scale = std::max(scale, b.comp[d].abs().maxCoeff());
    diff = std::max(diff, (a.comp[d] - b.comp[d]).abs().maxCoeff());
  }
  return diff / scale;
}

}  // namespace

TEST_SUITE("eval_fast") {

TEST_CASE("matches the direct evaluator on a separable kernel") {
  const VelocityGrid g = make_grid(8.0, 12);
  const SSKernel k = gaussian_ss(2);
  const ConvolutionPlan plan = make_plan(g, k, build_term_table());
  // Both fields are smooth, above the log floor, and far from equilibrium,
  // so the flux scale is O(1e-1) and the comparison is not noise-limited.
  for (int which = 0; which < 2; ++which) {
    const ScalarField f = which == 0 ? gmm_field(g)
                                     : initcond::bimaxwellian(g, 1.0, 0.5, 2);
    CAPTURE(which);

    VectorField pd = collision_flux_direct(g, f, k);
    zero_boundary_layer(g, pd);  // fast flux zeroes the outermost layer
    const VectorField pf = collision_flux_fast(plan, f);
    CHECK(flux_rel_linf(pf, pd) <= 1e-10);

    const ScalarField rd = collision_rhs_direct(g, f, k);
    const ScalarField rf = collision_rhs_fast(plan, f);
    CHECK(rel_linf(rf, rd) <= 1e-10);
  }
}

TEST_CASE("matches direct with a single-mode rank-deficient kernel") {
  const VelocityGrid g = make_grid(8.0, 10);
  const SSKernel k = gaussian_ss(1, 0.9, 0.0);
  const ConvolutionPlan plan = make_plan(g, k, build_term_table());
  const ScalarField f = gmm_field(g);
  const ScalarField rd = collision_rhs_direct(g, f, k);
  const ScalarField rf = collision_rhs_fast(plan, f);
  CHECK(rel_linf(rf, rd) <= 1e-10);
}

TEST_CASE("single occupied node produces no flux") {
  // Only the diagonal pair contributes, and the diagonal is removed.
  const VelocityGrid g = make_grid(6.0, 10);
  const SSKernel k = gaussian_ss(1);
  const ConvolutionPlan plan = make_plan(g, k, build_term_table());
  ScalarField f = ScalarField::Zero(g.size());
  f[g.flat(5, 4, 6)] = 1.0;
  const VectorField p = collision_flux_fast(plan, f);
  // Roundoff only; a surviving diagonal would show up at O(h^3 |G|) ~ 1.
  for (int d = 0; d < 3; ++d) CHECK(p.comp[d].abs().maxCoeff() <= 1e-8);
}

TEST_CASE("flux is invariant to the stored diagonal sample") {
  const VelocityGrid g = make_grid(8.0, 10);
  const SSKernel k = gaussian_ss(1);
  PlanOptions zero_diag, unit_diag;
  unit_diag.diag_value = 1.0;
  const ConvolutionPlan p0 = make_plan(g, k, build_term_table(), zero_diag);
  const ConvolutionPlan p1 = make_plan(g, k, build_term_table(), unit_diag);
  const ScalarField f = gmm_field(g);
  const VectorField a = collision_flux_fast(p0, f);
  const VectorField b = collision_flux_fast(p1, f);
  CHECK(flux_rel_linf(a, b) <= 1e-12);
}

TEST_CASE("rhs conserves mass to roundoff") {
  const VelocityGrid g = make_grid(8.0, 12);
  const SSKernel k = gaussian_ss(2);
  const ConvolutionPlan plan = make_plan(g, k, build_term_table());
  const ScalarField f = gmm_field(g);
  const ScalarField r = collision_rhs_fast(plan, f);
  const Real mass = g.h * g.h * g.h * kahan_sum(r);
  const Real scale = g.h * g.h * g.h * kahan_sum(ScalarField(r.abs()));
  CHECK(std::abs(mass) <= 1e-13 * std::max<Real>(1e-6, scale));
}

TEST_CASE("plan is reusable and deterministic") {
  const VelocityGrid g = make_grid(6.0, 8);
  const SSKernel k = gaussian_ss(1);
  const ConvolutionPlan plan = make_plan(g, k, build_term_table());
  const ScalarField f = initcond::maxwellian(g, 0.4);
  const ScalarField r1 = collision_rhs_fast(plan, f);
  const ScalarField r2 = collision_rhs_fast(plan, f);
  CHECK((r1 == r2).all());
  CHECK(plan.memory_bytes() > 0);
}

TEST_CASE("rejects mismatched field sizes and empty plans") {
  const VelocityGrid g = make_grid(6.0, 8);
  const ConvolutionPlan plan = make_plan(g, gaussian_ss(1), build_term_table());
  const ScalarField wrong = ScalarField::Zero(10);
  CHECK_THROWS_AS(collision_flux_fast(plan, wrong), std::invalid_argument);
  const ConvolutionPlan empty;
  CHECK_THROWS_AS(collision_flux_fast(empty, ScalarField::Zero(0)),
                  std::invalid_argument);
}

}  // TEST_SUITE
