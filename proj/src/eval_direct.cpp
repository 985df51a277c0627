#include "sskinetic/eval_direct.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace sskinetic {

VectorField grad_log_floored(const VelocityGrid& g, const ScalarField& f,
                             Real f_min) {
  const ScalarField lf = f.max(f_min).log();
  return d_minus(g, lf, CopyBoundary{});
}

namespace {

struct NodeData {
  std::vector<Vec3> v;
  std::vector<int> i1, i2, i3;
};

NodeData gather_nodes(const VelocityGrid& g) {
  NodeData nd;
  const int n = g.n0;
  nd.v.reserve(g.size());
  nd.i1.reserve(g.size());
  nd.i2.reserve(g.size());
  nd.i3.reserve(g.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        nd.v.push_back(g.node(a, b, c));
        nd.i1.push_back(a);
        nd.i2.push_back(b);
        nd.i3.push_back(c);
      }
  return nd;
}

/*
 * SSKernel evaluation tables. On the lattice, |u| depends only on the
 * squared integer index distance s, so each expanded L is sampled once per
 * s value; M and N are sampled once per node. The pairing of the expanded
 * mode list already symmetrizes (M,N), so
 *   g_c(a,b) = sum_e L_e(h sqrt(s)) M_e(|v_a|) N_e(|v_b|).
 */
struct SSTables {
  int smax = 0;
  int ecount[2] = {0, 0};
  std::vector<Real> l[2];  // [e * (smax+1) + s]
  std::vector<Real> m[2];  // [e * N + node]
  std::vector<Real> nn[2];
  Real u_eps = 0;
};

SSTables build_tables(const SSKernel& k, const VelocityGrid& g,
                      const std::vector<Vec3>& nodes) {
  SSTables t;
  const int n = g.n0;
  const int N = static_cast<int>(nodes.size());
  t.smax = 3 * (n - 1) * (n - 1);
  t.u_eps = k.u_eps();
  std::vector<Real> anode(N);
  for (int a = 0; a < N; ++a) anode[a] = nodes[a].norm();
  for (int c = 1; c <= 2; ++c) {
    const int E = k.expanded_count(c);
    t.ecount[c - 1] = E;
    t.l[c - 1].resize(static_cast<size_t>(E) * (t.smax + 1));
    t.m[c - 1].resize(static_cast<size_t>(E) * N);
    t.nn[c - 1].resize(static_cast<size_t>(E) * N);
    for (int e = 1; e <= E; ++e) {
      const UnivariateBasis& L = k.expanded_L(c, e);
      const UnivariateBasis& M = k.expanded_M(c, e);
      const UnivariateBasis& Nb = k.expanded_N(c, e);
      Real* lrow = t.l[c - 1].data() + static_cast<size_t>(e - 1) * (t.smax + 1);
      for (int s = 0; s <= t.smax; ++s)
        lrow[s] = L(g.h * std::sqrt(static_cast<Real>(s)));
      Real* mrow = t.m[c - 1].data() + static_cast<size_t>(e - 1) * N;
      Real* nrow = t.nn[c - 1].data() + static_cast<size_t>(e - 1) * N;
      for (int a = 0; a < N; ++a) {
        mrow[a] = M(anode[a]);
        nrow[a] = Nb(anode[a]);
      }
    }
  }
  return t;
}

constexpr int kMaxModes = 32;

// g_1 and g_2 for the node pair (a, b); ma/na hold the a-node M/N samples
// per expanded mode. The expanded list already carries the (M,N) swap, so
// each expanded mode contributes the plain product M_e(a) N_e(b).
inline void pair_g(const SSTables& t, const Real* ma1, const Real* ma2,
                   int b, int N, int s, Real& g1, Real& g2) {
  g1 = 0;
  g2 = 0;
  const Real* l1 = t.l[0].data() + s;
  const Real* n1 = t.nn[0].data() + b;
  for (int e = 0; e < t.ecount[0]; ++e)
    g1 += l1[static_cast<size_t>(e) * (t.smax + 1)] * ma1[e] *
          n1[static_cast<size_t>(e) * N];
  const Real* l2 = t.l[1].data() + s;
  const Real* n2 = t.nn[1].data() + b;
  for (int e = 0; e < t.ecount[1]; ++e)
    g2 += l2[static_cast<size_t>(e) * (t.smax + 1)] * ma2[e] *
          n2[static_cast<size_t>(e) * N];
}

}  // namespace

VectorField collision_flux_direct(const VelocityGrid& g, const ScalarField& f,
                                  const PairKernel& kernel, Real f_min) {
  const int N = static_cast<int>(g.size());
  if (f.size() != N)
    throw std::invalid_argument("collision_flux_direct: field size mismatch");
  const VectorField G = grad_log_floored(g, f, f_min);
  VectorField p = VectorField::zero(N);
  const NodeData nd = gather_nodes(g);
  const Real h3 = g.h * g.h * g.h;
  const auto* ss = dynamic_cast<const SSKernel*>(&kernel);

  if (ss != nullptr) {
    const SSTables t = build_tables(*ss, g, nd.v);
    if (t.ecount[0] > kMaxModes || t.ecount[1] > kMaxModes)
      throw std::invalid_argument("collision_flux_direct: too many modes");
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (int a = 0; a < N; ++a) {
      const Real fa = f[a];
      if (fa == 0) continue;
      Real ma1[kMaxModes], ma2[kMaxModes];
      for (int e = 0; e < t.ecount[0]; ++e)
        ma1[e] = t.m[0][static_cast<size_t>(e) * N + a];
      for (int e = 0; e < t.ecount[1]; ++e)
        ma2[e] = t.m[1][static_cast<size_t>(e) * N + a];
      const Vec3 va = nd.v[a];
      const Vec3 Ga(G.comp[0][a], G.comp[1][a], G.comp[2][a]);
      Vec3 acc = Vec3::Zero();
      for (int b = 0; b < N; ++b) {
        const Real fb = f[b];
        if (fb == 0) continue;
        const int d1 = nd.i1[a] - nd.i1[b];
        const int d2 = nd.i2[a] - nd.i2[b];
        const int d3 = nd.i3[a] - nd.i3[b];
        const int s = d1 * d1 + d2 * d2 + d3 * d3;
        if (s == 0) continue;
        if (t.u_eps > 0 && g.h * std::sqrt(static_cast<Real>(s)) < t.u_eps)
          continue;
        Real g1, g2;
        pair_g(t, ma1, ma2, b, N, s, g1, g2);
        const Vec3 vb = nd.v[b];
        const Vec3 u = va - vb;
        const Real u2 = u.squaredNorm();
        const Vec3 r = va + vb;
        const Vec3 B = Ga - Vec3(G.comp[0][b], G.comp[1][b], G.comp[2][b]);
        const Vec3 pr = r - (u.dot(r) / u2) * u;
        const Vec3 pb = B - (u.dot(B) / u2) * u;
        const Real g1s = g1 * g1, g2s = g2 * g2;
        acc += fb * (g1s * pr.squaredNorm() * pb +
                     ((g2s - g1s) * pr.dot(B)) * pr);
      }
      const Vec3 pa = (fa * h3) * acc;
      p.comp[0][a] = pa[0];
      p.comp[1][a] = pa[1];
      p.comp[2][a] = pa[2];
    }
    return p;
  }

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (int a = 0; a < N; ++a) {
    const Real fa = f[a];
    if (fa == 0) continue;
    const Vec3 va = nd.v[a];
    const Vec3 Ga(G.comp[0][a], G.comp[1][a], G.comp[2][a]);
    Vec3 acc = Vec3::Zero();
    for (int b = 0; b < N; ++b) {
      const Real fb = f[b];
      if (fb == 0) continue;
      const Vec3 B = Ga - Vec3(G.comp[0][b], G.comp[1][b], G.comp[2][b]);
      acc += fb * (kernel.eval(va, nd.v[b]) * B);
    }
    const Vec3 pa = (fa * h3) * acc;
    p.comp[0][a] = pa[0];
    p.comp[1][a] = pa[1];
    p.comp[2][a] = pa[2];
  }
  return p;
}

ScalarField collision_rhs_direct(const VelocityGrid& g, const ScalarField& f,
                                 const PairKernel& kernel, Real f_min) {
  VectorField p = collision_flux_direct(g, f, kernel, f_min);
  zero_boundary_layer(g, p);
  return d_plus(g, p, ZeroExtend{});
}

Real entropy_production_direct(const VelocityGrid& g, const ScalarField& f,
                               const PairKernel& kernel, Real f_min) {
  const int N = static_cast<int>(g.size());
  if (f.size() != N)
    throw std::invalid_argument(
        "entropy_production_direct: field size mismatch");
  const VectorField G = grad_log_floored(g, f, f_min);
  const NodeData nd = gather_nodes(g);
  const Real h3 = g.h * g.h * g.h;
  const auto* ss = dynamic_cast<const SSKernel*>(&kernel);
  Real total = 0, total_abs = 0;

  if (ss != nullptr) {
    const SSTables t = build_tables(*ss, g, nd.v);
    if (t.ecount[0] > kMaxModes || t.ecount[1] > kMaxModes)
      throw std::invalid_argument("entropy_production_direct: too many modes");
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : total, total_abs)
#endif
    for (int a = 0; a < N; ++a) {
      const Real fa = f[a];
      if (fa == 0) continue;
      Real ma1[kMaxModes], ma2[kMaxModes];
      for (int e = 0; e < t.ecount[0]; ++e)
        ma1[e] = t.m[0][static_cast<size_t>(e) * N + a];
      for (int e = 0; e < t.ecount[1]; ++e)
        ma2[e] = t.m[1][static_cast<size_t>(e) * N + a];
      const Vec3 va = nd.v[a];
      const Vec3 Ga(G.comp[0][a], G.comp[1][a], G.comp[2][a]);
      for (int b = 0; b < N; ++b) {
        const Real fb = f[b];
        if (fb == 0) continue;
        const int d1 = nd.i1[a] - nd.i1[b];
        const int d2 = nd.i2[a] - nd.i2[b];
        const int d3 = nd.i3[a] - nd.i3[b];
        const int s = d1 * d1 + d2 * d2 + d3 * d3;
        if (s == 0) continue;
        if (t.u_eps > 0 && g.h * std::sqrt(static_cast<Real>(s)) < t.u_eps)
          continue;
        Real g1, g2;
        pair_g(t, ma1, ma2, b, N, s, g1, g2);
        const Vec3 vb = nd.v[b];
        const Vec3 u = va - vb;
        const Real u2 = u.squaredNorm();
        const Vec3 r = va + vb;
        const Vec3 B = Ga - Vec3(G.comp[0][b], G.comp[1][b], G.comp[2][b]);
        const Vec3 pr = r - (u.dot(r) / u2) * u;
        const Vec3 pb = B - (u.dot(B) / u2) * u;
        const Real g1s = g1 * g1, g2s = g2 * g2;
        const Real prB = pr.dot(B);
        const Real quad =
            g1s * pr.squaredNorm() * B.dot(pb) + (g2s - g1s) * prB * prB;
        const Real c = fa * fb * quad;
        total += c;
        total_abs += std::abs(c);
      }
    }
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : total, total_abs)
#endif
    for (int a = 0; a < N; ++a) {
      const Real fa = f[a];
      if (fa == 0) continue;
      const Vec3 va = nd.v[a];
      const Vec3 Ga(G.comp[0][a], G.comp[1][a], G.comp[2][a]);
      for (int b = 0; b < N; ++b) {
        const Real fb = f[b];
        if (fb == 0) continue;
        const Vec3 B = Ga - Vec3(G.comp[0][b], G.comp[1][b], G.comp[2][b]);
        const Real c = fa * fb * B.dot(kernel.eval(va, nd.v[b]) * B);
        total += c;
        total_abs += std::abs(c);
      }
    }
  }

  const Real value = 0.5 * h3 * h3 * total;
  const Real scale = 0.5 * h3 * h3 * total_abs;
  if (value < -1e-12 * scale)
    throw std::logic_error(
        "entropy_production_direct: negative beyond roundoff");
  return value;
}

}  // namespace sskinetic
