#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sskinetic/grid.hpp"
#include "sskinetic/kernel.hpp"
#include "sskinetic/types.hpp"

namespace sskinetic::learning {

/// Velocity samples at uniformly spaced snapshot times. Every snapshot holds
/// the same number of samples.
struct ParticleEnsemble {
  std::vector<Real> times;
  std::vector<std::vector<Vec3>> snapshots;
  Real dt = 0;

  int n_snapshots() const { return int(times.size()); }
  int n_samples() const {
    return snapshots.empty() ? 0 : int(snapshots.front().size());
  }
};

/// Throws std::invalid_argument on unequal sample counts, non-increasing or
/// non-uniform times, or a times/snapshots length mismatch.
void validate_ensemble(const ParticleEnsemble& e);

/// One-line JSON header {"n_snapshots","n_samples","dt","times"} followed by
/// CSV rows (snapshot, vx, vy, vz).
void write_ensemble(const std::string& path, const ParticleEnsemble& e);
ParticleEnsemble read_ensemble(const std::string& path);

struct TestFunction {
  std::string name;
  std::function<Real(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> grad;
  std::function<Mat3(const Vec3&)> hess;
};

struct TestFunctionSet {
  std::vector<TestFunction> fns;
};

/// The K = 5 radial set, r = |v|: exp(-6r^2), 6r^2 exp(-1.2r^2),
/// exp(-(6r^2-1)^2), exp(-(2.5r-0.2)^2), exp(-(2.5r-0.5)^2).
TestFunctionSet default_test_functions();

struct FitConfig {
  int pair_count = 2000;  // P pairs per estimator batch
  Real step_size = Real(0.05);
  int iterations = 40;
  /// Central-difference step per parameter: fd_step * max(1, |theta_i|).
  Real fd_step = Real(1e-3);
  std::uint64_t seed = 0;
  /// Parameter indices to optimize; empty = all.
  std::vector<int> param_indices;
  /// Reuse the same pair batches every iteration (descent checks).
  bool fixed_batch = false;
  /// Halve the step while the update worsens the same-batch loss.
  bool backtrack = true;
};

/// (1 / (N dt)) sum_m [psi(v_m^{n+1}) - psi(v_m^n)]; 0 <= n < n_snapshots-1.
Real md_side_moment(const ParticleEnsemble& e, const TestFunction& psi, int n);

/// Mini-batch estimator of the weak-form collision moment at snapshot n:
/// mean over P sampled pairs of omega : hess psi(v)
/// + div_v omega . grad psi(v) - div_v' omega . grad psi(v).
/// Degenerate pairs (v = v') are resampled. Deterministic for fixed seed.
Real kinetic_side_moment(const ParticleEnsemble& e, int n, const PairKernel& k,
                         const TestFunction& psi, int pair_count,
                         std::uint64_t seed);

/// Sum over test functions and snapshot intervals of the squared mismatch
/// between the md-side and kinetic-side moments.
Real loss(const ParticleEnsemble& e, const PairKernel& k,
          const TestFunctionSet& set, int pair_count, std::uint64_t seed);

struct FitResult {
  SSKernel kernel;
  std::vector<Real> loss_history;  // loss per iteration, final appended
};

/// Gradient descent on the kernel's basis parameters with central
/// finite-difference gradients; the +/- perturbations of one iteration share
/// the same pair batch. Throws std::runtime_error on non-finite loss, naming
/// the offending parameter vector.
FitResult fit(const ParticleEnsemble& e, const SSKernel& initial,
              const TestFunctionSet& set, const FitConfig& cfg);

/// n i.i.d. velocities from the gridded density: cells chosen by mass, the
/// in-cell position by exact inverse-CDF sampling of the trilinear
/// interpolant (negative corners clamped to zero).
std::vector<Vec3> sample_velocities(const VelocityGrid& g,
                                    const ScalarField& f, int n,
                                    std::uint64_t seed);

/// Evolves f0 with the fast solver and samples every requested snapshot.
/// times must be uniformly spaced; n_samples >= 1.
ParticleEnsemble synthesize_ensemble(const SSKernel& kernel,
                                     const ScalarField& f0,
                                     const VelocityGrid& g,
                                     const std::vector<Real>& times,
                                     int n_samples, std::uint64_t seed);

}  // namespace sskinetic::learning
