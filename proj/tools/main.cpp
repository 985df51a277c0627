#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <fftw3.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "sskinetic/analysis.hpp"
#include "sskinetic/eval_direct.hpp"
#include "sskinetic/eval_fast.hpp"
#include "sskinetic/field_io.hpp"
#include "sskinetic/initcond.hpp"
#include "sskinetic/kernel.hpp"
#include "sskinetic/learning.hpp"
#include "sskinetic/solver.hpp"
#include "sskinetic/term_table.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sskinetic;

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 validation failure, 2 numerical failure, 3 I/O.
struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw CliError{code, message};
}

struct CommonOpts {
  std::string config;
  std::string out = "out";
  int threads = 0;
  long long seed = -1;  // negative: keep config/default seed
  std::string evaluator;
  double threshold = 1e-9;
};

void apply_threads(int n) {
  if (n <= 0) {
    if (const char* env = std::getenv("SSKINETIC_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) return;
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
  Eigen::setNbThreads(n);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(3, "cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(1, "malformed config " + path + ": " + e.what());
  }
}

/// Fetches a dotted-path field, naming the path in the error message.
json get_field(const json& j, const std::string& dotted) {
  const json* at = &j;
  std::size_t begin = 0;
  while (begin <= dotted.size()) {
    const std::size_t dot = dotted.find('.', begin);
    const std::string key = dotted.substr(
        begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (!at->is_object() || !at->contains(key))
      fail(1, "config is missing required field '" + dotted + "'");
    at = &(*at)[key];
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  return *at;
}

template <class T>
T get_as(const json& j, const std::string& dotted) {
  try {
    return get_field(j, dotted).get<T>();
  } catch (const json::exception& e) {
    fail(1, "config field '" + dotted + "' has the wrong type: " + e.what());
  }
}

template <class T>
T get_or(const json& j, const std::string& dotted, T fallback) {
  const json* at = &j;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', begin);
    const std::string key = dotted.substr(
        begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (!at->is_object() || !at->contains(key)) return fallback;
    at = &(*at)[key];
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  try {
    return at->get<T>();
  } catch (const json::exception& e) {
    fail(1, "config field '" + dotted + "' has the wrong type: " + e.what());
  }
}

VelocityGrid parse_grid(const json& cfg) {
  const Real L = get_as<Real>(cfg, "grid.L");
  const int n0 = get_as<int>(cfg, "grid.N0");
  try {
    return make_grid(L, n0);
  } catch (const std::invalid_argument& e) {
    fail(1, std::string("config field 'grid': ") + e.what());
  }
}

std::unique_ptr<PairKernel> parse_kernel(const json& k,
                                         const std::string& where) {
  if (k.contains("file")) {
    const std::string path = get_as<std::string>(k, "file");
    return std::make_unique<SSKernel>(load_kernel_json(path));
  }
  const std::string name = k.contains("builtin")
                               ? get_as<std::string>(k, "builtin")
                               : std::string();
  if (name == "gaussian_ss")
    return std::make_unique<SSKernel>(gaussian_ss(
        get_or<int>(k, "jprime", 1), get_or<Real>(k, "amp1", 0.8),
        get_or<Real>(k, "amp2", 0.4)));
  if (name == "landau_like")
    return std::make_unique<LandauLikeKernel>(get_or<Real>(k, "c", 1.0),
                                              get_or<Real>(k, "reg", 0.05));
  if (name == "constant_p")
    return std::make_unique<ConstantPKernel>(get_or<Real>(k, "c", 1.0));
  fail(1, "config field '" + where + ".builtin': unknown kernel '" + name +
              "' (expected gaussian_ss, landau_like, or constant_p)");
}

const SSKernel* as_separated(const PairKernel* k, const std::string& what) {
  const auto* ss = dynamic_cast<const SSKernel*>(k);
  if (!ss)
    fail(1, "direct-only kernel: " + k->describe() + " has no separated form" +
                " (required for " + what + ")");
  return ss;
}

ScalarField parse_init(const json& cfg, const VelocityGrid& g) {
  const std::string type = get_as<std::string>(cfg, "init.type");
  try {
    if (type == "gmm") return initcond::gmm(g);
    if (type == "rm") return initcond::rm(g);
    if (type == "maxwellian")
      return initcond::maxwellian(g, get_as<Real>(cfg, "init.T"));
    if (type == "bimaxwellian")
      return initcond::bimaxwellian(g, get_as<Real>(cfg, "init.T_axis"),
                                    get_as<Real>(cfg, "init.T_perp"),
                                    get_as<int>(cfg, "init.axis"));
    if (type == "uniform_ball")
      return initcond::uniform_ball(g, get_as<Real>(cfg, "init.radius"));
  } catch (const std::invalid_argument& e) {
    fail(1, std::string("config field 'init': ") + e.what());
  }
  fail(1, "config field 'init.type': unknown initial condition '" + type +
              "' (expected gmm, rm, maxwellian, bimaxwellian, uniform_ball)");
}

solver::EvaluatorKind parse_evaluator(const std::string& name) {
  if (name == "direct") return solver::EvaluatorKind::kDirect;
  if (name == "fast") return solver::EvaluatorKind::kFast;
  fail(1, "evaluator must be 'direct' or 'fast', got '" + name + "'");
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(3, "cannot create output directory " + out + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) fail(3, "cannot open " + path);
  f << text;
  if (!f) fail(3, "write failed: " + path);
}

void write_manifest(const std::string& out, const std::string& command,
                    const json& config, double wall_seconds, int exit_code,
                    json extra) {
  json m;
  m["command"] = command;
  m["config"] = config;
  json versions;
  versions["sskinetic"] = kVersion;
  versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION);
  versions["fftw"] = static_cast<const char*>(fftw_version);
  m["versions"] = versions;
  m["wall_clock_seconds"] = wall_seconds;
  m["exit_code"] = exit_code;
#ifdef _OPENMP
  m["threads"] = omp_get_max_threads();
#else
  m["threads"] = 1;
#endif
  m.update(extra);
  write_text(out + "/manifest.json", m.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string csv_real(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const json cfg = load_json(o.config);
  const VelocityGrid grid = parse_grid(cfg);
  const auto kernel = parse_kernel(get_field(cfg, "kernel"), "kernel");
  const ScalarField f0 = parse_init(cfg, grid);

  solver::RunConfig rc;
  rc.end_time = get_as<Real>(cfg, "run.T");
  rc.dt_coeff = get_or<Real>(cfg, "run.c_dt", rc.dt_coeff);
  rc.snapshot_times = get_or<std::vector<Real>>(cfg, "run.snapshots", {});
  rc.f_min = get_or<Real>(cfg, "run.f_min", rc.f_min);
  const std::string evname = !o.evaluator.empty()
                                 ? o.evaluator
                                 : get_or<std::string>(cfg, "run.evaluator",
                                                       "fast");
  rc.evaluator = parse_evaluator(evname);
  rc.kernel = kernel.get();
  if (rc.evaluator == solver::EvaluatorKind::kFast)
    as_separated(kernel.get(), "the fast evaluator");

  ensure_out_dir(o.out);
  solver::Trajectory traj;
  try {
    traj = solver::run(grid, f0, rc);
  } catch (const std::invalid_argument& e) {
    fail(1, std::string("run config: ") + e.what());
  }

  solver::write_diagnostics_csv(o.out + "/diagnostics.csv", traj);
  json outputs = json::array();
  outputs.push_back("diagnostics.csv");
  int snap_index = 0;
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& s = traj.snapshots[i];
    const bool requested =
        std::any_of(rc.snapshot_times.begin(), rc.snapshot_times.end(),
                    [&](Real t) {
                      return std::abs(t - s.time) <=
                             1e-12 * std::max(Real(1), rc.end_time);
                    });
    if (!requested) continue;
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%03d.csv", snap_index++);
    write_field(o.out + "/" + name, grid, s.f, s.time);
    outputs.push_back(name);
  }
  if (!traj.diagnostic_snapshot.empty()) {
    write_field(o.out + "/abort_state.csv", grid,
                traj.diagnostic_snapshot.front().f,
                traj.diagnostic_snapshot.front().time);
    outputs.push_back("abort_state.csv");
  }

  const int code = traj.status == solver::RunStatus::kCompleted ? 0 : 2;
  json extra;
  extra["status"] = solver::to_string(traj.status);
  extra["dt"] = traj.dt;
  extra["steps"] = traj.diagnostics.size() - 1;
  extra["negativity_events"] = traj.negativity_events.size();
  extra["outputs"] = outputs;
  write_manifest(o.out, "simulate", cfg, seconds_since(t0), code, extra);

  const auto& last = traj.diagnostics.back();
  std::printf("simulate: %s after %zu steps, t=%.6g mass=%.12g entropy=%.12g\n",
              solver::to_string(traj.status).c_str(),
              traj.diagnostics.size() - 1, last.time, last.mass, last.entropy);
  if (code != 0)
    std::fprintf(stderr, "simulate: run %s\n",
                 solver::to_string(traj.status).c_str());
  return code;
}

// ----------------------------------------------------------------- compare

int cmd_compare(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const json cfg = load_json(o.config);
  const VelocityGrid grid = parse_grid(cfg);
  const auto kernel = parse_kernel(get_field(cfg, "kernel"), "kernel");
  const SSKernel* ss = as_separated(kernel.get(), "cmd_compare");
  const ScalarField f = parse_init(cfg, grid);
  const Real f_min = get_or<Real>(cfg, "run.f_min", default_f_min);

  VectorField flux_d = collision_flux_direct(grid, f, *kernel, f_min);
  // The fast path zeroes the outermost flux layer by construction; apply the
  // same mask to the direct flux so the comparison sees the common policy.
  zero_boundary_layer(grid, flux_d);
  const ScalarField rhs_d = collision_rhs_direct(grid, f, *kernel, f_min);

  const ConvolutionPlan plan = make_plan(grid, *ss, build_term_table());
  const VectorField flux_f = collision_flux_fast(plan, f, f_min);
  const ScalarField rhs_f = collision_rhs_fast(plan, f, f_min);

  Real flux_abs = 0, flux_scale = 0;
  for (int d = 0; d < 3; ++d) {
    flux_abs = std::max(flux_abs,
                        (flux_d.comp[d] - flux_f.comp[d]).abs().maxCoeff());
    flux_scale = std::max(flux_scale, flux_d.comp[d].abs().maxCoeff());
  }
  const Real rhs_abs = (rhs_d - rhs_f).abs().maxCoeff();
  const Real rhs_scale = rhs_d.abs().maxCoeff();
  const Real tiny = 1e-300;
  const Real flux_rel = flux_abs / std::max(flux_scale, tiny);
  const Real rhs_rel = rhs_abs / std::max(rhs_scale, tiny);
  const Real worst = std::max(flux_rel, rhs_rel);
  const int code = worst <= Real(o.threshold) ? 0 : 2;

  std::printf("compare: flux  max|diff|=%.3e rel=%.3e\n", flux_abs, flux_rel);
  std::printf("compare: rhs   max|diff|=%.3e rel=%.3e\n", rhs_abs, rhs_rel);
  std::printf("compare: threshold %.3e -> %s\n", o.threshold,
              code == 0 ? "PASS" : "FAIL");

  ensure_out_dir(o.out);
  json report;
  report["flux_abs_diff"] = flux_abs;
  report["flux_rel_linf"] = flux_rel;
  report["rhs_abs_diff"] = rhs_abs;
  report["rhs_rel_linf"] = rhs_rel;
  report["threshold"] = o.threshold;
  report["pass"] = code == 0;
  write_text(o.out + "/compare_report.json", report.dump(2) + "\n");
  write_manifest(o.out, "compare", cfg, seconds_since(t0), code,
                 json{{"outputs", {"compare_report.json"}}});
  return code;
}

// ------------------------------------------------------------------- bench

int cmd_bench(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const json cfg = load_json(o.config);
  const auto sizes = get_as<std::vector<int>>(cfg, "sizes");
  if (sizes.empty()) fail(1, "config field 'sizes' must list at least one N0");
  const Real L = get_or<Real>(cfg, "L", 8.0);
  const int reps = get_or<int>(cfg, "repetitions", 3);
  const int cap = get_or<int>(cfg, "direct_cap", 32);
  if (reps < 1) fail(1, "config field 'repetitions' must be >= 1");
  const json kcfg = cfg.contains("kernel")
                        ? get_field(cfg, "kernel")
                        : json{{"builtin", "gaussian_ss"}, {"jprime", 1}};
  const auto kernel = parse_kernel(kcfg, "kernel");
  const SSKernel* ss = as_separated(kernel.get(), "cmd_bench");

  ensure_out_dir(o.out);
  std::string csv = "N0,N,t_direct,t_fast\n";
  const TermTable table = build_term_table();
  for (const int n0 : sizes) {
    VelocityGrid g;
    try {
      g = make_grid(L, n0);
    } catch (const std::invalid_argument& e) {
      fail(1, std::string("config field 'sizes': ") + e.what());
    }
    const ScalarField f =
        cfg.contains("init") ? parse_init(cfg, g)
                             : initcond::maxwellian(g, Real(0.3));
    const ConvolutionPlan plan = make_plan(g, *ss, table);

    std::vector<double> fast_times;
    for (int r = 0; r < reps; ++r) {
      const auto tick = std::chrono::steady_clock::now();
      const VectorField p = collision_flux_fast(plan, f);
      fast_times.push_back(seconds_since(tick));
      (void)p;
    }
    std::sort(fast_times.begin(), fast_times.end());
    const double t_fast = fast_times[fast_times.size() / 2];

    double t_direct = std::numeric_limits<double>::quiet_NaN();
    if (n0 <= cap) {
      std::vector<double> direct_times;
      for (int r = 0; r < reps; ++r) {
        const auto tick = std::chrono::steady_clock::now();
        const VectorField p = collision_flux_direct(g, f, *kernel);
        direct_times.push_back(seconds_since(tick));
        (void)p;
      }
      std::sort(direct_times.begin(), direct_times.end());
      t_direct = direct_times[direct_times.size() / 2];
    } else {
      std::printf("bench: direct skipped for N0=%d (cap %d)\n", n0, cap);
    }

    csv += std::to_string(n0) + "," + std::to_string(g.size()) + "," +
           csv_real(t_direct) + "," + csv_real(t_fast) + "\n";
    std::printf("bench: N0=%3d t_direct=%s s t_fast=%s s\n", n0,
                csv_real(t_direct).c_str(), csv_real(t_fast).c_str());
  }
  write_text(o.out + "/bench.csv", csv);
  write_manifest(o.out, "bench", cfg, seconds_since(t0), 0,
                 json{{"outputs", {"bench.csv"}}});
  return 0;
}

// ------------------------------------------------------------- convergence

int cmd_convergence(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const json cfg = load_json(o.config);
  const Real L = get_as<Real>(cfg, "grid.L");
  std::vector<int> mesh = get_as<std::vector<int>>(cfg, "mesh");
  std::sort(mesh.begin(), mesh.end());
  mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
  if (mesh.size() < 2)
    fail(1, "config field 'mesh' needs at least two distinct resolutions");
  const int finest = mesh.back();
  for (const int n0 : mesh)
    if (finest % n0 != 0)
      fail(1, "config field 'mesh': " + std::to_string(n0) +
                  " does not divide the finest resolution " +
                  std::to_string(finest) + " (grids must be nested)");

  const auto kernel = parse_kernel(get_field(cfg, "kernel"), "kernel");
  const Real T = get_as<Real>(cfg, "run.T");
  std::vector<Real> times = get_or<std::vector<Real>>(cfg, "run.times", {T});
  const std::string evname = !o.evaluator.empty()
                                 ? o.evaluator
                                 : get_or<std::string>(cfg, "run.evaluator",
                                                       "fast");

  struct MeshRun {
    VelocityGrid grid;
    solver::Trajectory traj;
  };
  std::vector<MeshRun> runs;
  for (const int n0 : mesh) {
    MeshRun mr;
    mr.grid = make_grid(L, n0);
    const ScalarField f0 = parse_init(cfg, mr.grid);
    solver::RunConfig rc;
    rc.end_time = T;
    rc.dt_coeff = get_or<Real>(cfg, "run.c_dt", rc.dt_coeff);
    rc.snapshot_times = times;
    rc.evaluator = parse_evaluator(evname);
    rc.kernel = kernel.get();
    rc.f_min = get_or<Real>(cfg, "run.f_min", rc.f_min);
    if (rc.evaluator == solver::EvaluatorKind::kFast)
      as_separated(kernel.get(), "the fast evaluator");
    mr.traj = solver::run(mr.grid, f0, rc);
    if (mr.traj.status != solver::RunStatus::kCompleted)
      fail(2, "convergence: run at N0=" + std::to_string(n0) + " " +
                  solver::to_string(mr.traj.status));
    runs.push_back(std::move(mr));
  }

  const auto snapshot_at = [&](const MeshRun& mr, Real t) -> const ScalarField& {
    for (const auto& s : mr.traj.snapshots)
      if (std::abs(s.time - t) <= 1e-12 * std::max(Real(1), T)) return s.f;
    fail(2, "convergence: missing snapshot");
  };

  std::string csv = "time,N0,h,l1,l2,linf\n";
  std::printf("convergence:   time    N0        h            l1            l2          linf\n");
  for (const Real t : times)
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
      const auto err = analysis::relative_errors(
          runs[i].grid, snapshot_at(runs[i], t), runs.back().grid,
          snapshot_at(runs.back(), t));
      csv += csv_real(t) + "," + std::to_string(runs[i].grid.n0) + "," +
             csv_real(runs[i].grid.h) + "," + csv_real(err.l1) + "," +
             csv_real(err.l2) + "," + csv_real(err.linf) + "\n";
      std::printf("convergence: %6.3g %5d %12.6g %13.6e %13.6e %13.6e\n", t,
                  runs[i].grid.n0, runs[i].grid.h, err.l1, err.l2, err.linf);
    }
  ensure_out_dir(o.out);
  write_text(o.out + "/convergence.csv", csv);
  write_manifest(o.out, "convergence", cfg, seconds_since(t0), 0,
                 json{{"outputs", {"convergence.csv"}}});
  return 0;
}

// --------------------------------------------------------------------- fit

int cmd_fit(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const json cfg = load_json(o.config);
  ensure_out_dir(o.out);
  json outputs = json::array();

  learning::ParticleEnsemble ensemble;
  if (get_field(cfg, "ensemble").contains("file")) {
    ensemble = learning::read_ensemble(get_as<std::string>(cfg, "ensemble.file"));
  } else {
    const json syn = get_field(cfg, "ensemble.synthesize");
    const VelocityGrid grid = parse_grid(syn);
    const auto truth = parse_kernel(get_field(syn, "kernel"), "ensemble.synthesize.kernel");
    const SSKernel* ss = as_separated(truth.get(), "ensemble synthesis");
    const ScalarField f0 = parse_init(syn, grid);
    const auto times = get_as<std::vector<Real>>(syn, "times");
    const int n_samples = get_as<int>(syn, "n_samples");
    std::uint64_t seed = get_or<std::uint64_t>(syn, "seed", 0);
    if (o.seed >= 0) seed = std::uint64_t(o.seed);
    try {
      ensemble =
          learning::synthesize_ensemble(*ss, f0, grid, times, n_samples, seed);
    } catch (const std::invalid_argument& e) {
      fail(1, std::string("config field 'ensemble.synthesize': ") + e.what());
    }
    learning::write_ensemble(o.out + "/ensemble.csv", ensemble);
    outputs.push_back("ensemble.csv");
  }

  const auto initial =
      parse_kernel(get_field(cfg, "initial_kernel"), "initial_kernel");
  const SSKernel* init_ss = as_separated(initial.get(), "kernel fitting");

  learning::FitConfig fc;
  fc.pair_count = get_or<int>(cfg, "fit.P", fc.pair_count);
  fc.step_size = get_or<Real>(cfg, "fit.step_size", fc.step_size);
  fc.iterations = get_or<int>(cfg, "fit.iterations", fc.iterations);
  fc.fd_step = get_or<Real>(cfg, "fit.fd_step", fc.fd_step);
  fc.seed = get_or<std::uint64_t>(cfg, "fit.seed", 0);
  if (o.seed >= 0) fc.seed = std::uint64_t(o.seed);
  fc.param_indices = get_or<std::vector<int>>(cfg, "fit.param_indices", {});
  fc.fixed_batch = get_or<bool>(cfg, "fit.fixed_batch", false);
  fc.backtrack = get_or<bool>(cfg, "fit.backtrack", true);

  learning::FitResult result = [&] {
    try {
      return learning::fit(ensemble, *init_ss, learning::default_test_functions(),
                           fc);
    } catch (const std::invalid_argument& e) {
      fail(1, std::string("config field 'fit': ") + e.what());
    }
  }();

  save_kernel_json(o.out + "/fitted_kernel.json", result.kernel);
  outputs.push_back("fitted_kernel.json");
  std::string csv = "iteration,loss\n";
  for (std::size_t i = 0; i < result.loss_history.size(); ++i)
    csv += std::to_string(i) + "," + csv_real(result.loss_history[i]) + "\n";
  write_text(o.out + "/loss_history.csv", csv);
  outputs.push_back("loss_history.csv");

  const Real first = result.loss_history.front();
  const Real last = result.loss_history.back();
  std::printf("fit: loss %.6e -> %.6e (factor %.2f) over %zu iterations\n",
              first, last, first / std::max(last, Real(1e-300)),
              result.loss_history.size() - 1);
  write_manifest(o.out, "fit", cfg, seconds_since(t0), 0,
                 json{{"outputs", outputs},
                      {"initial_loss", first},
                      {"final_loss", last}});
  return 0;
}

// -------------------------------------------------------- diagnose-kernel

int cmd_diagnose(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const json cfg = load_json(o.config);
  const auto kernel = parse_kernel(get_field(cfg, "kernel"), "kernel");
  const int samples = get_or<int>(cfg, "samples", 400);
  std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 1);
  if (o.seed >= 0) seed = std::uint64_t(o.seed);

  const AdmissibilityReport rep =
      check_admissibility(*kernel, samples, unsigned(seed));
  std::printf("diagnose: rotation      %.3e\n", rep.rotation);
  std::printf("diagnose: permutation   %.3e\n", rep.permutation);
  std::printf("diagnose: orthogonality %.3e\n", rep.orthogonality);
  std::printf("diagnose: psd           %.3e\n", rep.psd);
  std::printf("diagnose: sign_symmetry %.3e\n", rep.sign_symmetry);
  const bool pass = rep.worst() <= Real(o.threshold);
  std::printf("diagnose: worst %.3e vs threshold %.3e -> %s\n", rep.worst(),
              o.threshold, pass ? "PASS" : "FAIL");

  ensure_out_dir(o.out);
  json outputs = json::array();
  json jr;
  jr["rotation"] = rep.rotation;
  jr["permutation"] = rep.permutation;
  jr["orthogonality"] = rep.orthogonality;
  jr["psd"] = rep.psd;
  jr["sign_symmetry"] = rep.sign_symmetry;
  jr["worst"] = rep.worst();
  jr["threshold"] = o.threshold;
  jr["pass"] = pass;
  write_text(o.out + "/admissibility.json", jr.dump(2) + "\n");
  outputs.push_back("admissibility.json");

  // g^2 export over a (|u|,|v|,|v'|) lattice. g_s^2/g_r^2 carry the |Pr|^2
  // geometric factor, which only exists where the triple is realizable
  // (triangle inequality); unrealizable points get nan there.
  if (const auto* ss = dynamic_cast<const SSKernel*>(kernel.get())) {
    const Real v_max = get_or<Real>(cfg, "v_max", 3.0);
    const int n = get_or<int>(cfg, "lattice_n", 9);
    if (n < 2) fail(1, "config field 'lattice_n' must be >= 2");
    std::string csv = "au,av,avp,g1_sq,g2_sq,g_s_sq,g_r_sq\n";
    const Real nan = std::numeric_limits<Real>::quiet_NaN();
    for (int iu = 0; iu < n; ++iu)
      for (int iv = 0; iv < n; ++iv)
        for (int ip = 0; ip < n; ++ip) {
          const Real au = v_max * iu / (n - 1);
          const Real av = v_max * iv / (n - 1);
          const Real avp = v_max * ip / (n - 1);
          const Real g1 = eval_g(*ss, 1, au, av, avp);
          const Real g2 = eval_g(*ss, 2, au, av, avp);
          Real pr2 = nan;
          if (au > 0 && au >= std::abs(av - avp) - Real(1e-12) &&
              au <= av + avp + Real(1e-12)) {
            const Real ur_over_u = (av * av - avp * avp) / au;
            pr2 = std::max(2 * av * av + 2 * avp * avp - au * au -
                               ur_over_u * ur_over_u,
                           Real(0));
          }
          csv += csv_real(au) + "," + csv_real(av) + "," + csv_real(avp) +
                 "," + csv_real(g1 * g1) + "," + csv_real(g2 * g2) + "," +
                 csv_real(g1 * g1 * pr2) + "," + csv_real(g2 * g2 * pr2) +
                 "\n";
        }
    write_text(o.out + "/g2_export.csv", csv);
    outputs.push_back("g2_export.csv");
  } else {
    std::printf("diagnose: g2 export skipped (kernel has no separated form)\n");
  }

  const int code = pass ? 0 : 2;
  write_manifest(o.out, "diagnose-kernel", cfg, seconds_since(t0), code,
                 json{{"outputs", outputs}});
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision-operator toolkit: simulation, evaluator comparison, "
               "benchmarks, convergence studies, kernel fitting/diagnostics"};
  app.require_subcommand(1);

  CommonOpts o;
  const auto add_common = [&o](CLI::App* c, bool needs_config) {
    auto* opt = c->add_option("--config", o.config, "JSON config file");
    if (needs_config) opt->required();
    c->add_option("--out", o.out, "output directory (default: out)");
    c->add_option("--threads", o.threads,
                  "worker threads (or SSKINETIC_THREADS)");
    c->add_option("--seed", o.seed, "override config RNG seed");
    c->add_option("--threshold", o.threshold, "pass/fail threshold");
    return c;
  };

  auto* sim = add_common(app.add_subcommand(
      "simulate", "run a collision simulation from a JSON config"), true);
  sim->add_option("--evaluator", o.evaluator, "direct or fast");
  auto* cmp = add_common(app.add_subcommand(
      "compare", "direct vs fast evaluator on one field"), true);
  auto* ben = add_common(app.add_subcommand(
      "bench", "per-evaluator wall-time scaling"), true);
  auto* con = add_common(app.add_subcommand(
      "convergence", "mesh-refinement error tables"), true);
  con->add_option("--evaluator", o.evaluator, "direct or fast");
  auto* fit = add_common(app.add_subcommand(
      "fit", "weak-form kernel fitting"), true);
  auto* dia = add_common(app.add_subcommand(
      "diagnose-kernel", "admissibility checks and g^2 export"), true);

  CLI11_PARSE(app, argc, argv);

  try {
    apply_threads(o.threads);
    if (sim->parsed()) return cmd_simulate(o);
    if (cmp->parsed()) return cmd_compare(o);
    if (ben->parsed()) return cmd_bench(o);
    if (con->parsed()) return cmd_convergence(o);
    if (fit->parsed()) return cmd_fit(o);
    if (dia->parsed()) return cmd_diagnose(o);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    for (const char* tag : {"cannot open", "write failed", "read_ensemble",
                            "missing header", "bad header", "bad row"})
      if (what.find(tag) != std::string::npos) {
        std::fprintf(stderr, "io error: %s\n", what.c_str());
        return 3;
      }
    std::fprintf(stderr, "numerical error: %s\n", what.c_str());
    return 2;
  }
  return 0;
}
