#include "sskinetic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "sskinetic/analysis.hpp"
#include "sskinetic/eval_direct.hpp"
#include "sskinetic/term_table.hpp"

namespace sskinetic::solver {
namespace {

DiagnosticsRow make_row(const VelocityGrid& g, const ScalarField& f, Real t,
                        Real f_min) {
  const auto m = analysis::moments(g, f);
  DiagnosticsRow row;
  row.time = t;
  row.mass = m.mass;
  row.px = m.momentum[0];
  row.py = m.momentum[1];
  row.pz = m.momentum[2];
  row.energy = m.energy;
  row.entropy = analysis::entropy(g, f, f_min);
  row.min_f = f.minCoeff();
  return row;
}

std::vector<Real> event_times(const RunConfig& cfg) {
  std::vector<Real> ev = cfg.snapshot_times;
  ev.push_back(cfg.end_time);
  std::sort(ev.begin(), ev.end());
  ev.erase(std::unique(ev.begin(), ev.end(),
                       [&](Real a, Real b) {
                         return std::abs(a - b) <=
                                Real(1e-12) * std::max(Real(1), cfg.end_time);
                       }),
           ev.end());
  return ev;
}

bool wants_snapshot(const RunConfig& cfg, Real t) {
  for (Real s : cfg.snapshot_times)
    if (std::abs(s - t) <= Real(1e-12) * std::max(Real(1), cfg.end_time))
      return true;
  return false;
}

}  // namespace

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kCompleted: return "completed";
    case RunStatus::kAbortedNonFinite: return "aborted_non_finite_rhs";
    case RunStatus::kAbortedBlowup: return "aborted_blowup";
  }
  return "unknown";
}

ScalarField step_euler(const ScalarField& f, Real dt, const RhsEvaluator& rhs,
                       StepDiagnostics* diag) {
  const ScalarField r = rhs(f);
  if (!r.allFinite())
    throw std::runtime_error("step_euler: rhs is not finite");
  ScalarField next = f + dt * r;
  if (diag) {
    diag->min_f = next.minCoeff();
    diag->negative_mass = next.min(Real(0)).sum();
  }
  return next;
}

RhsEvaluator make_rhs_evaluator(const VelocityGrid& g, const RunConfig& cfg) {
  if (!cfg.kernel)
    throw std::invalid_argument("make_rhs_evaluator: kernel is required");
  const Real f_min = cfg.f_min;
  if (cfg.evaluator == EvaluatorKind::kDirect) {
    const PairKernel* k = cfg.kernel;
    return [&g, k, f_min](const ScalarField& f) {
      return collision_rhs_direct(g, f, *k, f_min);
    };
  }
  if (cfg.plan) {
    const ConvolutionPlan* plan = cfg.plan;
    if (plan->grid.n0 != g.n0)
      throw std::invalid_argument("make_rhs_evaluator: plan grid mismatch");
    return [plan, f_min](const ScalarField& f) {
      return collision_rhs_fast(*plan, f, f_min);
    };
  }
  const auto* ss = dynamic_cast<const SSKernel*>(cfg.kernel);
  if (!ss)
    throw std::invalid_argument(
        "make_rhs_evaluator: fast evaluator requires a separated kernel");
  auto plan = std::make_shared<ConvolutionPlan>(
      make_plan(g, *ss, build_term_table()));
  return [plan, f_min](const ScalarField& f) {
    return collision_rhs_fast(*plan, f, f_min);
  };
}

Trajectory run(const VelocityGrid& g, const ScalarField& f0,
               const RunConfig& cfg) {
  if (f0.size() != g.size())
    throw std::invalid_argument("run: f0 size does not match grid");
  if (!f0.allFinite()) throw std::invalid_argument("run: f0 is not finite");
  if (!(cfg.end_time >= 0))
    throw std::invalid_argument("run: end_time must be non-negative");
  const Real dt0 = cfg.dt_coeff * g.h * g.h;
  if (!(dt0 > 0)) throw std::invalid_argument("run: dt = c h^2 must be positive");
  for (Real s : cfg.snapshot_times)
    if (s < -Real(1e-12) ||
        s > cfg.end_time + Real(1e-12) * std::max(Real(1), cfg.end_time))
      throw std::invalid_argument("run: snapshot times must lie in [0, T]");

  Trajectory traj;
  traj.dt = dt0;
  traj.snapshots.push_back({Real(0), f0});
  traj.diagnostics.push_back(make_row(g, f0, 0, cfg.f_min));
  if (cfg.end_time == 0) return traj;

  const RhsEvaluator rhs = make_rhs_evaluator(g, cfg);
  const Real blowup_cap = Real(1e6) * f0.abs().maxCoeff();
  const std::vector<Real> events = event_times(cfg);

  ScalarField f = f0;
  Real t = 0;
  std::size_t next_event = 0;
  while (events[next_event] <= Real(1e-12) * std::max(Real(1), cfg.end_time))
    ++next_event;  // a requested t = 0 snapshot is already in place

  while (next_event < events.size()) {
    const Real target = events[next_event];
    // Land exactly on the event rather than leaving a sliver step behind.
    const bool landing = t + dt0 >= target - Real(1e-9) * dt0;
    const Real dt = landing ? target - t : dt0;

    StepDiagnostics sd;
    try {
      f = step_euler(f, dt, rhs, &sd);
    } catch (const std::runtime_error&) {
      traj.status = RunStatus::kAbortedNonFinite;
      traj.diagnostic_snapshot.push_back({t, f});
      return traj;
    }
    t = landing ? target : t + dt;

    traj.diagnostics.push_back(make_row(g, f, t, cfg.f_min));
    if (sd.min_f < -cfg.negativity_tol)
      traj.negativity_events.push_back(
          {t, sd.min_f, g.h * g.h * g.h * sd.negative_mass});
    if (f.abs().maxCoeff() > blowup_cap) {
      traj.status = RunStatus::kAbortedBlowup;
      traj.diagnostic_snapshot.push_back({t, f});
      return traj;
    }
    if (landing) {
      if (wants_snapshot(cfg, target)) traj.snapshots.push_back({target, f});
      ++next_event;
    }
  }
  return traj;
}

void write_diagnostics_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_diagnostics_csv: cannot open " + path);
  out << "time,mass,px,py,pz,energy,entropy,min_f\n";
  char buf[256];
  for (const auto& r : traj.diagnostics) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.time,
                  r.mass, r.px, r.py, r.pz, r.energy, r.entropy, r.min_f);
    out << buf;
  }
  if (!out) throw std::runtime_error("write_diagnostics_csv: write failed");
}

}  // namespace sskinetic::solver
