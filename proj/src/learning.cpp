#include "sskinetic/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sskinetic/reduce.hpp"
#include "sskinetic/solver.hpp"

namespace sskinetic::learning {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

/// Uniform double in [0, 1) from the top 53 bits.
Real uniform01(std::mt19937_64& rng) {
  return Real(rng() >> 11) * Real(0x1.0p-53);
}

TestFunction squared_radial(std::string name, std::function<Real(Real)> g,
                            std::function<Real(Real)> g1,
                            std::function<Real(Real)> g2) {
  TestFunction f;
  f.name = std::move(name);
  f.value = [g](const Vec3& v) { return g(v.squaredNorm()); };
  f.grad = [g1](const Vec3& v) -> Vec3 {
    return Real(2) * g1(v.squaredNorm()) * v;
  };
  f.hess = [g1, g2](const Vec3& v) -> Mat3 {
    const Real s = v.squaredNorm();
    return Real(2) * g1(s) * Mat3::Identity() +
           Real(4) * g2(s) * (v * v.transpose());
  };
  return f;
}

TestFunction radial(std::string name, std::function<Real(Real)> p,
                    std::function<Real(Real)> p1, std::function<Real(Real)> p2) {
  TestFunction f;
  f.name = std::move(name);
  f.value = [p](const Vec3& v) { return p(v.norm()); };
  // These profiles have a cusp at the origin; the zero returned below is a
  // guard for the measure-zero draw r = 0, not a limit.
  f.grad = [p1](const Vec3& v) -> Vec3 {
    const Real r = v.norm();
    if (r < Real(1e-12)) return Vec3::Zero();
    return (p1(r) / r) * v;
  };
  f.hess = [p1, p2](const Vec3& v) -> Mat3 {
    const Real r = v.norm();
    if (r < Real(1e-12)) return Mat3::Zero();
    const Mat3 hat = (v * v.transpose()) / (r * r);
    return p2(r) * hat + (p1(r) / r) * (Mat3::Identity() - hat);
  };
  return f;
}

struct PairList {
  std::vector<int> a, b;
};

/// P ordered index pairs with distinct velocities; pair_count = N^2 switches
/// to exhaustive enumeration of the non-degenerate pairs.
PairList draw_pairs(const std::vector<Vec3>& vs, long long pair_count,
                    std::uint64_t seed) {
  const long long n = (long long)vs.size();
  PairList out;
  if (pair_count == n * n) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!(vs[i].array() == vs[j].array()).all()) {
          out.a.push_back(i);
          out.b.push_back(j);
        }
    if (out.a.empty())
      throw std::runtime_error("draw_pairs: all velocities identical");
    return out;
  }
  std::mt19937_64 rng(seed);
  long long rejects = 0;
  while ((long long)out.a.size() < pair_count) {
    const int i = int(rng() % std::uint64_t(n));
    const int j = int(rng() % std::uint64_t(n));
    if ((vs[i].array() == vs[j].array()).all()) {
      if (++rejects > 1000 * pair_count + 1000)
        throw std::runtime_error("draw_pairs: all velocities identical");
      continue;
    }
    out.a.push_back(i);
    out.b.push_back(j);
  }
  return out;
}

std::string format_params(const std::vector<Real>& p) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << "]";
  return os.str();
}

/// Inverse CDF of the linear density a(1-t) + b t on [0, 1), a,b >= 0.
Real inv_linear_cdf(Real a, Real b, Real u) {
  const Real disc = a * a + u * (b * b - a * a);
  const Real denom = a + std::sqrt(std::max(disc, Real(0)));
  if (denom <= 0) return u;  // flat-zero conditional, degenerate cell face
  return std::min(u * (a + b) / denom, Real(1) - Real(1e-16));
}

}  // namespace

void validate_ensemble(const ParticleEnsemble& e) {
  if (e.times.empty() || e.snapshots.size() != e.times.size())
    throw std::invalid_argument("ensemble: times/snapshots size mismatch");
  const std::size_t m = e.snapshots.front().size();
  if (m == 0) throw std::invalid_argument("ensemble: empty snapshots");
  for (const auto& s : e.snapshots)
    if (s.size() != m)
      throw std::invalid_argument("ensemble: unequal sample counts");
  for (std::size_t i = 1; i < e.times.size(); ++i) {
    const Real gap = e.times[i] - e.times[i - 1];
    if (!(gap > 0))
      throw std::invalid_argument("ensemble: times must be increasing");
    if (std::abs(gap - e.dt) > Real(1e-9) * std::max(Real(1), std::abs(e.dt)))
      throw std::invalid_argument("ensemble: non-uniform snapshot spacing");
  }
  if (e.times.size() >= 2 && !(e.dt > 0))
    throw std::invalid_argument("ensemble: dt must be positive");
}

void write_ensemble(const std::string& path, const ParticleEnsemble& e) {
  validate_ensemble(e);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_ensemble: cannot open " + path);
  nlohmann::json header;
  header["n_snapshots"] = e.n_snapshots();
  header["n_samples"] = e.n_samples();
  header["dt"] = e.dt;
  header["times"] = e.times;
  out << header.dump() << "\n";
  out << "snapshot,vx,vy,vz\n";
  char buf[160];
  for (int s = 0; s < e.n_snapshots(); ++s)
    for (const Vec3& v : e.snapshots[s]) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", s, v[0], v[1],
                    v[2]);
      out << buf;
    }
  if (!out) throw std::runtime_error("write_ensemble: write failed");
}

ParticleEnsemble read_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_ensemble: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_ensemble: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& err) {
    throw std::runtime_error(std::string("read_ensemble: bad header: ") +
                             err.what());
  }
  ParticleEnsemble e;
  const int n_snapshots = header.at("n_snapshots").get<int>();
  const int n_samples = header.at("n_samples").get<int>();
  e.dt = header.at("dt").get<Real>();
  e.times = header.at("times").get<std::vector<Real>>();
  if (int(e.times.size()) != n_snapshots)
    throw std::runtime_error("read_ensemble: header times length mismatch");
  e.snapshots.assign(n_snapshots, {});
  for (auto& s : e.snapshots) s.reserve(n_samples);
  if (!std::getline(in, line) || line.rfind("snapshot,", 0) != 0)
    throw std::runtime_error("read_ensemble: missing column header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int s = 0;
    double x = 0, y = 0, z = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &s, &x, &y, &z) != 4)
      throw std::runtime_error("read_ensemble: bad row: " + line);
    if (s < 0 || s >= n_snapshots)
      throw std::runtime_error("read_ensemble: snapshot index out of range");
    e.snapshots[s].emplace_back(x, y, z);
  }
  for (const auto& s : e.snapshots)
    if (int(s.size()) != n_samples)
      throw std::runtime_error("read_ensemble: row count mismatch");
  validate_ensemble(e);
  return e;
}

TestFunctionSet default_test_functions() {
  TestFunctionSet set;
  set.fns.push_back(squared_radial(
      "exp(-6r^2)", [](Real s) { return std::exp(-6 * s); },
      [](Real s) { return -6 * std::exp(-6 * s); },
      [](Real s) { return 36 * std::exp(-6 * s); }));
  set.fns.push_back(squared_radial(
      "6r^2*exp(-1.2r^2)",
      [](Real s) { return 6 * s * std::exp(Real(-1.2) * s); },
      [](Real s) { return (6 - Real(7.2) * s) * std::exp(Real(-1.2) * s); },
      [](Real s) {
        return (Real(8.64) * s - Real(14.4)) * std::exp(Real(-1.2) * s);
      }));
  set.fns.push_back(squared_radial(
      "exp(-(6r^2-1)^2)",
      [](Real s) {
        const Real w = 6 * s - 1;
        return std::exp(-w * w);
      },
      [](Real s) {
        const Real w = 6 * s - 1;
        return -12 * w * std::exp(-w * w);
      },
      [](Real s) {
        const Real w = 6 * s - 1;
        return (144 * w * w - 72) * std::exp(-w * w);
      }));
  for (const Real c : {Real(0.2), Real(0.5)}) {
    char name[40];
    std::snprintf(name, sizeof name, "exp(-(2.5r-%.1f)^2)", c);
    set.fns.push_back(radial(
        name,
        [c](Real r) {
          const Real w = Real(2.5) * r - c;
          return std::exp(-w * w);
        },
        [c](Real r) {
          const Real w = Real(2.5) * r - c;
          return -5 * w * std::exp(-w * w);
        },
        [c](Real r) {
          const Real w = Real(2.5) * r - c;
          return (25 * w * w - Real(12.5)) * std::exp(-w * w);
        }));
  }
  return set;
}

Real md_side_moment(const ParticleEnsemble& e, const TestFunction& psi,
                    int n) {
  validate_ensemble(e);
  if (n < 0 || n + 1 >= e.n_snapshots())
    throw std::invalid_argument("md_side_moment: interval index out of range");
  const auto& now = e.snapshots[n];
  const auto& next = e.snapshots[n + 1];
  KahanAccumulator acc;
  for (std::size_t m = 0; m < now.size(); ++m)
    acc.add(psi.value(next[m]) - psi.value(now[m]));
  return acc.sum / (Real(now.size()) * e.dt);
}

Real kinetic_side_moment(const ParticleEnsemble& e, int n, const PairKernel& k,
                         const TestFunction& psi, int pair_count,
                         std::uint64_t seed) {
  validate_ensemble(e);
  if (n < 0 || n >= e.n_snapshots())
    throw std::invalid_argument("kinetic_side_moment: snapshot out of range");
  const auto& vs = e.snapshots[n];
  const long long nn = (long long)vs.size() * (long long)vs.size();
  if (pair_count < 1 || pair_count > nn)
    throw std::invalid_argument(
        "kinetic_side_moment: need 1 <= P <= n_samples^2");
  const PairList pairs = draw_pairs(vs, pair_count, seed);
  KahanAccumulator acc;
  for (std::size_t p = 0; p < pairs.a.size(); ++p) {
    const Vec3& v = vs[pairs.a[p]];
    const Vec3& vp = vs[pairs.b[p]];
    const Mat3 omega = k.eval(v, vp);
    const Vec3 grad = psi.grad(v);
    Real term = (omega.array() * psi.hess(v).array()).sum();
    term += kernel_divergence_v(k, v, vp).dot(grad);
    term -= kernel_divergence_vprime(k, v, vp).dot(grad);
    acc.add(term);
  }
  return acc.sum / Real(pairs.a.size());
}

Real loss(const ParticleEnsemble& e, const PairKernel& k,
          const TestFunctionSet& set, int pair_count, std::uint64_t seed) {
  validate_ensemble(e);
  if (set.fns.empty()) throw std::invalid_argument("loss: empty test set");
  if (e.n_snapshots() < 2)
    throw std::invalid_argument("loss: need at least two snapshots");
  Real total = 0;
  for (int n = 0; n + 1 < e.n_snapshots(); ++n)
    for (std::size_t kk = 0; kk < set.fns.size(); ++kk) {
      const std::uint64_t s =
          mix_seed(seed, std::uint64_t(n) * 1000003ull + kk);
      const Real diff = md_side_moment(e, set.fns[kk], n) -
                        kinetic_side_moment(e, n, k, set.fns[kk], pair_count, s);
      total += diff * diff;
    }
  return total;
}

FitResult fit(const ParticleEnsemble& e, const SSKernel& initial,
              const TestFunctionSet& set, const FitConfig& cfg) {
  validate_ensemble(e);
  if (cfg.pair_count < 1 || !(cfg.step_size > 0) || cfg.iterations < 1 ||
      !(cfg.fd_step > 0))
    throw std::invalid_argument("fit: bad config");
  SSKernel work = initial;
  std::vector<Real> theta = work.parameters();
  std::vector<int> mask = cfg.param_indices;
  if (mask.empty()) {
    mask.resize(theta.size());
    std::iota(mask.begin(), mask.end(), 0);
  }
  for (int i : mask)
    if (i < 0 || i >= int(theta.size()))
      throw std::invalid_argument("fit: parameter index out of range");

  const auto eval_loss = [&](const std::vector<Real>& th, std::uint64_t s) {
    work.set_parameters(th);
    const Real value = loss(e, work, set, cfg.pair_count, s);
    if (!std::isfinite(value))
      throw std::runtime_error("fit: non-finite loss at parameters " +
                               format_params(th));
    return value;
  };

  FitResult result{initial, {}};
  for (int it = 0; it <= cfg.iterations; ++it) {
    const std::uint64_t s_it =
        cfg.fixed_batch ? cfg.seed : mix_seed(cfg.seed, 0x17ull + it);
    const Real base = eval_loss(theta, s_it);
    result.loss_history.push_back(base);
    if (it == cfg.iterations) break;

    std::vector<Real> grad(mask.size(), 0);
    for (std::size_t j = 0; j < mask.size(); ++j) {
      const int i = mask[j];
      const Real delta = cfg.fd_step * std::max(Real(1), std::abs(theta[i]));
      std::vector<Real> th = theta;
      th[i] = theta[i] + delta;
      const Real up = eval_loss(th, s_it);
      th[i] = theta[i] - delta;
      const Real down = eval_loss(th, s_it);
      grad[j] = (up - down) / (2 * delta);
    }

    Real lr = cfg.step_size;
    bool accepted = false;
    for (int halve = 0; halve < 12 && !accepted; ++halve, lr /= 2) {
      std::vector<Real> cand = theta;
      for (std::size_t j = 0; j < mask.size(); ++j)
        cand[mask[j]] -= lr * grad[j];
      if (!cfg.backtrack || eval_loss(cand, s_it) <= base) {
        theta = std::move(cand);
        accepted = true;
      }
    }
    // All halvings worsened the same-batch loss: keep the current point.
  }
  work.set_parameters(theta);
  result.kernel = work;
  return result;
}

std::vector<Vec3> sample_velocities(const VelocityGrid& g,
                                    const ScalarField& f, int n,
                                    std::uint64_t seed) {
  if (f.size() != g.size())
    throw std::invalid_argument("sample_velocities: field size mismatch");
  if (n < 1) throw std::invalid_argument("sample_velocities: need n >= 1");
  const int nc = g.n0 - 1;
  const auto corner = [&](int i, int j, int k) {
    return std::max(f[g.flat(i, j, k)], Real(0));
  };
  // Cell mass of the trilinear interpolant is the corner mean times h^3.
  std::vector<Real> cum(std::size_t(nc) * nc * nc);
  Real total = 0;
  std::size_t at = 0;
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j)
      for (int k = 0; k < nc; ++k, ++at) {
        Real m = 0;
        for (int d = 0; d < 8; ++d)
          m += corner(i + (d >> 2 & 1), j + (d >> 1 & 1), k + (d & 1));
        total += m;
        cum[at] = total;
      }
  if (!(total > 0))
    throw std::invalid_argument("sample_velocities: density has no mass");

  std::mt19937_64 rng(seed);
  std::vector<Vec3> out;
  out.reserve(n);
  Real c[2][2][2];
  while (int(out.size()) < n) {
    const Real pick = uniform01(rng) * total;
    const std::size_t cell =
        std::min(std::size_t(std::upper_bound(cum.begin(), cum.end(), pick) -
                             cum.begin()),
                 cum.size() - 1);
    const int i = int(cell / (std::size_t(nc) * nc));
    const int j = int(cell / nc % nc);
    const int k = int(cell % nc);
    for (int dx = 0; dx < 2; ++dx)
      for (int dy = 0; dy < 2; ++dy)
        for (int dz = 0; dz < 2; ++dz)
          c[dx][dy][dz] = corner(i + dx, j + dy, k + dz);

    const Real ax = c[0][0][0] + c[0][0][1] + c[0][1][0] + c[0][1][1];
    const Real bx = c[1][0][0] + c[1][0][1] + c[1][1][0] + c[1][1][1];
    const Real x = inv_linear_cdf(ax, bx, uniform01(rng));
    const Real wx0 = 1 - x, wx1 = x;

    const Real ay = (c[0][0][0] + c[0][0][1]) * wx0 + (c[1][0][0] + c[1][0][1]) * wx1;
    const Real by = (c[0][1][0] + c[0][1][1]) * wx0 + (c[1][1][0] + c[1][1][1]) * wx1;
    const Real y = inv_linear_cdf(ay, by, uniform01(rng));
    const Real wy0 = 1 - y, wy1 = y;

    const Real az = c[0][0][0] * wx0 * wy0 + c[1][0][0] * wx1 * wy0 +
                    c[0][1][0] * wx0 * wy1 + c[1][1][0] * wx1 * wy1;
    const Real bz = c[0][0][1] * wx0 * wy0 + c[1][0][1] * wx1 * wy0 +
                    c[0][1][1] * wx0 * wy1 + c[1][1][1] * wx1 * wy1;
    const Real z = inv_linear_cdf(az, bz, uniform01(rng));

    out.emplace_back(g.coord(i) + g.h * x, g.coord(j) + g.h * y,
                     g.coord(k) + g.h * z);
  }
  return out;
}

ParticleEnsemble synthesize_ensemble(const SSKernel& kernel,
                                     const ScalarField& f0,
                                     const VelocityGrid& g,
                                     const std::vector<Real>& times,
                                     int n_samples, std::uint64_t seed) {
  if (times.empty())
    throw std::invalid_argument("synthesize_ensemble: no snapshot times");
  if (n_samples < 1)
    throw std::invalid_argument("synthesize_ensemble: need n_samples >= 1");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("synthesize_ensemble: times must increase");

  ParticleEnsemble e;
  e.times = times;
  e.dt = times.size() >= 2 ? times[1] - times[0] : Real(0);

  solver::RunConfig rc;
  rc.end_time = times.back();
  rc.snapshot_times = times;
  rc.evaluator = solver::EvaluatorKind::kFast;
  rc.kernel = &kernel;
  const solver::Trajectory traj = solver::run(g, f0, rc);
  if (traj.status != solver::RunStatus::kCompleted)
    throw std::runtime_error("synthesize_ensemble: run " +
                             solver::to_string(traj.status));

  for (std::size_t i = 0; i < times.size(); ++i) {
    const solver::Snapshot* match = nullptr;
    for (const auto& s : traj.snapshots)
      if (std::abs(s.time - times[i]) <=
          Real(1e-12) * std::max(Real(1), times.back())) {
        match = &s;
        break;
      }
    if (!match)
      throw std::runtime_error("synthesize_ensemble: missing snapshot");
    e.snapshots.push_back(
        sample_velocities(g, match->f, n_samples, mix_seed(seed, i)));
  }
  validate_ensemble(e);
  return e;
}

}  // namespace sskinetic::learning
