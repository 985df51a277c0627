#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sskinetic/eval_fast.hpp"
#include "sskinetic/grid.hpp"
#include "sskinetic/kernel.hpp"
#include "sskinetic/types.hpp"

namespace sskinetic::solver {

enum class EvaluatorKind { kDirect, kFast };

/// Forward-Euler run configuration. dt = dt_coeff * h^2; the step is
/// shortened only to land exactly on snapshot times and on end_time, so the
/// effective step never exceeds the fixed dt.
struct RunConfig {
  Real end_time = 1;
  Real dt_coeff = Real(0.1);
  std::vector<Real> snapshot_times;
  EvaluatorKind evaluator = EvaluatorKind::kFast;
  const PairKernel* kernel = nullptr;
  Real f_min = default_f_min;
  Real negativity_tol = Real(1e-12);
  /// Optional prebuilt plan for the fast evaluator (must match grid and
  /// kernel); when null a plan is built on demand.
  const ConvolutionPlan* plan = nullptr;
};

struct Snapshot {
  Real time = 0;
  ScalarField f;
};

struct DiagnosticsRow {
  Real time = 0;
  Real mass = 0;
  Real px = 0, py = 0, pz = 0;
  Real energy = 0;
  Real entropy = 0;
  Real min_f = 0;
};

/// Emitted when min f drops below -negativity_tol; negative_mass is
/// h^3 sum of the negative part. Values are never clipped.
struct NegativityEvent {
  Real time = 0;
  Real min_f = 0;
  Real negative_mass = 0;
};

enum class RunStatus { kCompleted, kAbortedNonFinite, kAbortedBlowup };

std::string to_string(RunStatus s);

struct Trajectory {
  RunStatus status = RunStatus::kCompleted;
  Real dt = 0;
  std::vector<Snapshot> snapshots;        // always starts with f0 at t = 0
  std::vector<DiagnosticsRow> diagnostics;  // row per step plus the t = 0 row
  std::vector<NegativityEvent> negativity_events;
  /// State at the failure step for aborted runs; empty otherwise.
  std::vector<Snapshot> diagnostic_snapshot;
};

using RhsEvaluator = std::function<ScalarField(const ScalarField&)>;

struct StepDiagnostics {
  Real min_f = 0;
  Real negative_mass = 0;
};

/// One forward-Euler step f' = f + dt rhs(f). Throws std::runtime_error if
/// the evaluated rhs is not finite.
ScalarField step_euler(const ScalarField& f, Real dt, const RhsEvaluator& rhs,
                       StepDiagnostics* diag = nullptr);

/// Bundles the configured evaluator into a callable rhs; builds (and owns)
/// a convolution plan when the fast path has none supplied. The fast path
/// requires a separated kernel.
RhsEvaluator make_rhs_evaluator(const VelocityGrid& g, const RunConfig& cfg);

/// Fixed-step Euler loop to end_time with per-step diagnostics, snapshots at
/// the requested times, a blow-up guard at 1e6 x the initial max norm, and
/// negativity logging. end_time = 0 yields only f0. Throws
/// std::invalid_argument on bad config (snapshot times outside [0, T],
/// non-positive dt, missing kernel, f0/grid mismatch).
Trajectory run(const VelocityGrid& g, const ScalarField& f0,
               const RunConfig& cfg);

/// CSV with header time,mass,px,py,pz,energy,entropy,min_f.
void write_diagnostics_csv(const std::string& path, const Trajectory& traj);

}  // namespace sskinetic::solver
