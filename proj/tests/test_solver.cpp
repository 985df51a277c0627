#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "sskinetic/analysis.hpp"
#include "sskinetic/initcond.hpp"
#include "sskinetic/solver.hpp"

using namespace sskinetic;

namespace {

solver::RunConfig base_config(const PairKernel& k) {
  solver::RunConfig cfg;
  cfg.kernel = &k;
  cfg.evaluator = solver::EvaluatorKind::kFast;
  return cfg;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("euler step is exact for a frozen rhs") {
  const ScalarField f = ScalarField::LinSpaced(5, 1.0, 2.0);
  const ScalarField r = ScalarField::Constant(5, -0.5);
  const ScalarField f1 =
      solver::step_euler(f, 0.25, [&](const ScalarField&) { return r; });
  CHECK((f1 - (f + 0.25 * r)).abs().maxCoeff() == 0.0);

  solver::StepDiagnostics diag;
  const ScalarField f2 = solver::step_euler(
      f, 4.0, [&](const ScalarField&) { return r; }, &diag);
  CHECK(diag.min_f == f2.minCoeff());
  CHECK(diag.min_f < 0);
}

TEST_CASE("euler step rejects a non-finite rhs") {
  const ScalarField f = ScalarField::Ones(4);
  CHECK_THROWS_AS(solver::step_euler(f, 0.1,
                                     [](const ScalarField& x) {
                                       ScalarField r = x;
                                       r[2] = std::nan("");
                                       return r;
                                     }),
                  std::runtime_error);
}

TEST_CASE("end_time zero returns only the initial state") {
  const VelocityGrid g = make_grid(8.0, 8);
  const ScalarField f0 = initcond::maxwellian(g, 0.4);
  const SSKernel k = gaussian_ss(1);
  solver::RunConfig cfg = base_config(k);
  cfg.end_time = 0;
  const auto traj = solver::run(g, f0, cfg);
  CHECK(traj.status == solver::RunStatus::kCompleted);
  REQUIRE(traj.snapshots.size() == 1);
  CHECK(traj.snapshots[0].time == 0.0);
  CHECK((traj.snapshots[0].f == f0).all());
  CHECK(traj.diagnostics.size() == 1);
}

TEST_CASE("snapshots land exactly on the requested times") {
  const VelocityGrid g = make_grid(8.0, 8);
  const ScalarField f0 = initcond::gmm(g);
  const SSKernel k = gaussian_ss(1);
  solver::RunConfig cfg = base_config(k);
  cfg.end_time = 0.037;
  cfg.dt_coeff = 0.05;
  cfg.snapshot_times = {0.0101, 0.025, 0.037};
  const auto traj = solver::run(g, f0, cfg);
  CHECK(traj.status == solver::RunStatus::kCompleted);
  REQUIRE(traj.snapshots.size() == 4);  // f0 plus the three requested
  CHECK(traj.snapshots[0].time == 0.0);
  CHECK(traj.snapshots[1].time == 0.0101);
  CHECK(traj.snapshots[2].time == 0.025);
  CHECK(traj.snapshots[3].time == 0.037);
  CHECK(traj.dt == 0.05 * g.h * g.h);
  // Landing shortens the step (up to the tiny landing window slack).
  for (std::size_t i = 1; i < traj.diagnostics.size(); ++i)
    CHECK(traj.diagnostics[i].time - traj.diagnostics[i - 1].time <=
          traj.dt * (1 + 1e-8));
  CHECK(traj.diagnostics.back().time == 0.037);
}

TEST_CASE("one fast step conserves mass and a full run conserves it too") {
  const VelocityGrid g = make_grid(8.0, 12);
  const ScalarField f0 = initcond::gmm(g);
  const SSKernel k = gaussian_ss(1);
  solver::RunConfig cfg = base_config(k);
  cfg.end_time = 10 * 0.1 * g.h * g.h;  // ten full steps
  const auto traj = solver::run(g, f0, cfg);
  CHECK(traj.status == solver::RunStatus::kCompleted);
  const Real m0 = traj.diagnostics.front().mass;
  for (const auto& row : traj.diagnostics)
    CHECK(std::abs(row.mass - m0) <= 1e-13 * std::abs(m0));
}

TEST_CASE("maxwellian is a near fixed point") {
  const VelocityGrid g = make_grid(8.0, 12);
  const ScalarField f0 = initcond::maxwellian(g, 0.4);
  const SSKernel k = gaussian_ss(1);
  solver::RunConfig cfg = base_config(k);
  cfg.end_time = 5 * 0.1 * g.h * g.h;
  const auto traj = solver::run(g, f0, cfg);
  CHECK(traj.status == solver::RunStatus::kCompleted);
  const ScalarField& fT = traj.snapshots.back().f;
  // G = grad log f is linear in v, so [G_i - G_j] is parallel to u = v_i - v_j
  // wherever the floor is inactive and omega u = 0 kills the flux; the
  // residual is floor + discretization noise, far below the field scale.
  CHECK((fT - f0).abs().maxCoeff() <= 1e-6 * f0.maxCoeff());
}

TEST_CASE("entropy is non-decreasing on a relaxing state") {
  const VelocityGrid g = make_grid(8.0, 12);
  // Temperature anisotropy relaxing toward isotropy: smooth, well resolved,
  // with an entropy production rate far above the Euler step's dt^2 bias.
  const ScalarField f0 = initcond::bimaxwellian(g, 1.0, 0.5, 2);
  const SSKernel k = gaussian_ss(1);
  solver::RunConfig cfg = base_config(k);
  cfg.end_time = 20 * 0.1 * g.h * g.h;
  const auto traj = solver::run(g, f0, cfg);
  CHECK(traj.status == solver::RunStatus::kCompleted);
  for (std::size_t i = 1; i < traj.diagnostics.size(); ++i)
    CHECK(traj.diagnostics[i].entropy >=
          traj.diagnostics[i - 1].entropy - 1e-12);
}

TEST_CASE("direct and fast evaluators agree inside the loop") {
  const VelocityGrid g = make_grid(8.0, 8);
  const ScalarField f0 = initcond::gmm(g);
  const SSKernel k = gaussian_ss(1);
  solver::RunConfig cfg = base_config(k);
  cfg.end_time = 3 * 0.1 * g.h * g.h;
  const auto fast = solver::run(g, f0, cfg);
  cfg.evaluator = solver::EvaluatorKind::kDirect;
  const auto direct = solver::run(g, f0, cfg);
  REQUIRE(fast.status == solver::RunStatus::kCompleted);
  REQUIRE(direct.status == solver::RunStatus::kCompleted);
  const ScalarField& a = fast.snapshots.back().f;
  const ScalarField& b = direct.snapshots.back().f;
  CHECK((a - b).abs().maxCoeff() <= 1e-10 * b.maxCoeff());
}

TEST_CASE("a supplied plan is used and must match the grid") {
  const VelocityGrid g = make_grid(8.0, 8);
  const SSKernel k = gaussian_ss(1);
  const ConvolutionPlan plan = make_plan(g, k, build_term_table());
  const ScalarField f0 = initcond::maxwellian(g, 0.4);
  solver::RunConfig cfg = base_config(k);
  cfg.plan = &plan;
  cfg.end_time = 0.1 * g.h * g.h;
  const auto traj = solver::run(g, f0, cfg);
  CHECK(traj.status == solver::RunStatus::kCompleted);

  const VelocityGrid g2 = make_grid(8.0, 12);
  CHECK_THROWS_AS(solver::run(g2, initcond::maxwellian(g2, 0.4), cfg),
                  std::invalid_argument);
}

TEST_CASE("fast evaluator demands a separated kernel") {
  const VelocityGrid g = make_grid(8.0, 8);
  const LandauLikeKernel k(1.0, 0.05);
  solver::RunConfig cfg = base_config(k);
  CHECK_THROWS_AS(solver::make_rhs_evaluator(g, cfg), std::invalid_argument);
  cfg.evaluator = solver::EvaluatorKind::kDirect;
  CHECK(solver::make_rhs_evaluator(g, cfg) != nullptr);
}

TEST_CASE("config validation") {
  const VelocityGrid g = make_grid(8.0, 8);
  const ScalarField f0 = initcond::maxwellian(g, 0.4);
  const SSKernel k = gaussian_ss(1);

  solver::RunConfig cfg = base_config(k);
  cfg.kernel = nullptr;
  CHECK_THROWS_AS(solver::run(g, f0, cfg), std::invalid_argument);

  cfg = base_config(k);
  cfg.dt_coeff = 0;
  CHECK_THROWS_AS(solver::run(g, f0, cfg), std::invalid_argument);

  cfg = base_config(k);
  cfg.snapshot_times = {2.0};  // outside [0, end_time]
  cfg.end_time = 1.0;
  CHECK_THROWS_AS(solver::run(g, f0, cfg), std::invalid_argument);

  cfg = base_config(k);
  CHECK_THROWS_AS(solver::run(g, ScalarField::Zero(7), cfg),
                  std::invalid_argument);
}

TEST_CASE("negativity is logged, never clipped") {
  const VelocityGrid g = make_grid(8.0, 8);
  // A sharp-edged ball stepped past the stability limit: the first Euler
  // step overshoots below zero at the rim, and three steps stay far under
  // the blow-up cap so the run still completes.
  const ScalarField f0 = initcond::uniform_ball(g, 1.6);
  const SSKernel k = gaussian_ss(1);
  solver::RunConfig cfg = base_config(k);
  cfg.dt_coeff = 1.0;
  cfg.end_time = 3 * 1.0 * g.h * g.h;
  cfg.snapshot_times = {cfg.end_time};
  cfg.negativity_tol = 1e-15;
  const auto traj = solver::run(g, f0, cfg);
  REQUIRE(traj.status == solver::RunStatus::kCompleted);
  REQUIRE(!traj.negativity_events.empty());
  const auto& ev = traj.negativity_events.front();
  CHECK(ev.min_f < 0);
  CHECK(ev.negative_mass <= 0);
  Real seen = 0;
  for (const auto& row : traj.diagnostics) seen = std::min(seen, row.min_f);
  CHECK(seen <= ev.min_f);
  // Nothing was clipped: the logged minimum is the state's actual minimum.
  CHECK(traj.diagnostics.back().min_f == traj.snapshots.back().f.minCoeff());
}

TEST_CASE("blow-up aborts with a diagnostic snapshot") {
  const VelocityGrid g = make_grid(8.0, 8);
  const ScalarField f0 = initcond::maxwellian(g, 0.4);
  // A runaway rhs is simplest to trigger through step_euler directly; the
  // run-level guard is exercised with an amplified kernel instead.
  SSKernel k = gaussian_ss(1, 80.0, 40.0);
  solver::RunConfig cfg = base_config(k);
  cfg.end_time = 1000.0;
  cfg.dt_coeff = 20.0;  // far past the stability limit
  const auto traj = solver::run(g, f0, cfg);
  REQUIRE(traj.status != solver::RunStatus::kCompleted);
  REQUIRE(traj.diagnostic_snapshot.size() == 1);
  CHECK(traj.diagnostic_snapshot[0].time > 0);
  CHECK(to_string(traj.status).size() > 0);
}

TEST_CASE("diagnostics csv round trip") {
  const VelocityGrid g = make_grid(8.0, 8);
  const ScalarField f0 = initcond::maxwellian(g, 0.4);
  const SSKernel k = gaussian_ss(1);
  solver::RunConfig cfg = base_config(k);
  cfg.end_time = 2 * 0.1 * g.h * g.h;
  const auto traj = solver::run(g, f0, cfg);
  const auto path =
      (std::filesystem::temp_directory_path() / "ssk_diag_test.csv").string();
  solver::write_diagnostics_csv(path, traj);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "time,mass,px,py,pz,energy,entropy,min_f");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t, m, px, py, pz, en, s, mf;
    CHECK(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &t, &m,
                      &px, &py, &pz, &en, &s, &mf) == 8);
    if (rows == 0) CHECK(t == 0.0);
    ++rows;
  }
  CHECK(rows == traj.diagnostics.size());
  // %.17g survives the text round trip bit for bit.
  std::ifstream in2(path);
  std::getline(in2, line);
  std::getline(in2, line);
  double t0 = -1;
  std::sscanf(line.c_str(), "%lf", &t0);
  CHECK(t0 == traj.diagnostics[0].time);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
