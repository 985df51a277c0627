#include "sskinetic/eval_fast.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace sskinetic {

using fastdetail::BucketSlot;
using fastdetail::ChannelPlan;
using fastdetail::KernelComp;
using fastdetail::MacJob;
using fastdetail::ModePairPlan;

namespace {

/*
 * Source-field enumeration, all built per (channel, mode pair) from
 * w = nw * f on the unpadded grid:
 *   ids  0..2   S[q]    = |v'|^(2q) w                     q = 0..2
 *   ids  3..11  T[q][d] = S[q] * G_d                      q = 0..2, d = 0..2
 *   ids 12..17  Q[q][d] = S[q] * v'_d                     q = 0..1
 *   ids 18..19  Z[q]    = S[q] * (v' . G)                 q = 0..1
 * S feeds the piece contracted with G at the destination; T, Z carry the
 * source-side G contraction; Q leaves a gamma-owned column index open.
 */
constexpr int kNumSrc = 20;

int src_s(int q) { return q; }
int src_t(int q, int d) { return 3 + q * 3 + d; }
int src_q(int q, int d) {
  if (q > 1) throw std::logic_error("eval_fast: gamma power too high");
  return 12 + q * 3 + d;
}
int src_z(int q) {
  if (q > 1) throw std::logic_error("eval_fast: gamma power too high");
  return 18 + q;
}

constexpr int kSymIdx[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
constexpr int kSymRow[6] = {0, 0, 0, 1, 1, 2};
constexpr int kSymCol[6] = {0, 1, 2, 1, 2, 2};

int kind_ncomp(BetaKind k) {
  const int r = beta_rank(k);
  return r == 2 ? 6 : (r == 1 ? 3 : 1);
}

Real beta_comp_value(BetaKind k, int comp, const Vec3& u) {
  const int r = beta_rank(k);
  if (r == 2) return beta_matrix(k, u)(kSymRow[comp], kSymCol[comp]);
  if (r == 1) return beta_vector(k, u)[comp];
  return beta_scalar(k, u);
}

struct ChannelLayout {
  std::vector<std::pair<BetaKind, int>> comps;
  int lookup[8][6];
  ChannelLayout() {
    for (auto& row : lookup)
      for (int& x : row) x = -1;
  }
  int require(BetaKind k, int comp) const {
    const int i = lookup[static_cast<int>(k)][comp];
    if (i < 0) throw std::logic_error("eval_fast: missing kernel component");
    return i;
  }
};

ChannelLayout build_layout(const std::vector<TermSpec>& terms) {
  ChannelLayout lay;
  for (const TermSpec& t : terms) {
    const int ki = static_cast<int>(t.beta);
    for (int c = 0; c < kind_ncomp(t.beta); ++c)
      if (lay.lookup[ki][c] < 0) {
        lay.lookup[ki][c] = static_cast<int>(lay.comps.size());
        lay.comps.emplace_back(t.beta, c);
      }
  }
  return lay;
}

std::vector<BucketSlot> build_schedule(const std::vector<TermSpec>& terms,
                                       const ChannelLayout& lay,
                                       std::vector<char>& src_needed) {
  std::map<std::tuple<int, int, int>, std::vector<MacJob>> slots;
  auto add = [&](int kind, int pa, int comp, int kcomp, int src, Real coeff) {
    slots[{kind, pa, comp}].push_back(MacJob{kcomp, src, coeff});
    src_needed[src] = 1;
  };
  for (const TermSpec& t : terms) {
    const Real c = t.sign * t.coeff;
    const int pa = t.alpha_pow, pg = t.gamma_pow;
    const bool row_alpha = t.row_owner == Owner::Alpha;
    const bool col_gamma = t.col_owner == Owner::Gamma;
    if (!row_alpha && !col_gamma) {
      // symmetric-matrix beta owns both indices
      for (int m = 0; m < 6; ++m)
        add(fastdetail::kMsym, pa, m, lay.require(t.beta, m), src_s(pg), c);
      for (int r = 0; r < 3; ++r)
        for (int d = 0; d < 3; ++d)
          add(fastdetail::kVd, pa, r, lay.require(t.beta, kSymIdx[r][d]),
              src_t(pg, d), -c);
    } else if (row_alpha && !col_gamma) {
      // v (alpha) x beta-vector
      for (int d = 0; d < 3; ++d) {
        add(fastdetail::kVg, pa, d, lay.require(t.beta, d), src_s(pg), c);
        add(fastdetail::kSc, pa, 0, lay.require(t.beta, d), src_t(pg, d), -c);
      }
    } else if (!row_alpha && col_gamma) {
      // beta-vector x v' (gamma)
      for (int r = 0; r < 3; ++r) {
        for (int d = 0; d < 3; ++d)
          add(fastdetail::kMgen, pa, r * 3 + d, lay.require(t.beta, r),
              src_q(pg, d), c);
        add(fastdetail::kVd, pa, r, lay.require(t.beta, r), src_z(pg), -c);
      }
    } else {
      // v (alpha) x v' (gamma), scalar beta
      for (int d = 0; d < 3; ++d)
        add(fastdetail::kVg, pa, d, lay.require(t.beta, 0), src_q(pg, d), c);
      add(fastdetail::kSc, pa, 0, lay.require(t.beta, 0), src_z(pg), -c);
    }
  }
  std::vector<BucketSlot> out;
  out.reserve(slots.size());
  for (auto& [key, jobs] : slots) {
    BucketSlot s;
    s.kind = std::get<0>(key);
    s.pa = std::get<1>(key);
    s.comp = std::get<2>(key);
    s.jobs = std::move(jobs);
    out.push_back(std::move(s));
  }
  return out;
}

const Real kProbe[13] = {0.0, 0.17, 0.5,  0.93, 1.31, 1.7, 2.2,
                         2.9, 3.7,  4.6,  6.0,  8.5,  12.0};

struct PairSpec {
  int e1, e2;
  Real wt;
};

// Unordered expanded-mode pairs with identical (L L', M M', N N') product
// functions merged; weights carry the multiplicities.
std::vector<PairSpec> dedup_pairs(const SSKernel& k, int channel) {
  const int E = k.expanded_count(channel);
  std::map<std::vector<Real>, int> seen;
  std::vector<PairSpec> pairs;
  for (int e1 = 1; e1 <= E; ++e1)
    for (int e2 = e1; e2 <= E; ++e2) {
      std::vector<Real> key;
      key.reserve(3 * 13);
      for (Real x : kProbe)
        key.push_back(k.expanded_L(channel, e1)(x) *
                      k.expanded_L(channel, e2)(x));
      for (Real x : kProbe)
        key.push_back(k.expanded_M(channel, e1)(x) *
                      k.expanded_M(channel, e2)(x));
      for (Real x : kProbe)
        key.push_back(k.expanded_N(channel, e1)(x) *
                      k.expanded_N(channel, e2)(x));
      const Real wt = e1 == e2 ? 1.0 : 2.0;
      auto [it, inserted] = seen.emplace(std::move(key),
                                         static_cast<int>(pairs.size()));
      if (inserted)
        pairs.push_back(PairSpec{e1, e2, wt});
      else
        pairs[it->second].wt += wt;
    }
  return pairs;
}

bool channel_active(const SSKernel& k, int channel) {
  const Real xs[8] = {0.0, 0.3, 0.8, 1.5, 2.5, 4.0, 6.0, 9.0};
  for (Real au : xs)
    for (Real av : xs)
      for (Real avp : xs)
        if (eval_g(k, channel, au, av, avp) != 0.0) return true;
  return false;
}

void embed_window(const VelocityGrid& g, int P, const ArrayX& field,
                  Real* out) {
  const int n = g.n0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      Real* row = out + (static_cast<std::size_t>(x) * P + y) * P;
      const Real* src = field.data() + g.flat(x, y, 0);
      std::copy(src, src + n, row);
    }
}

void extract_window(const VelocityGrid& g, int P, const Real* in,
                    ArrayX& field) {
  const int n = g.n0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const Real* row = in + (static_cast<std::size_t>(x) * P + y) * P;
      Real* dst = field.data() + g.flat(x, y, 0);
      std::copy(row, row + n, dst);
    }
}

}  // namespace

std::size_t ConvolutionPlan::memory_bytes() const {
  std::size_t total = 0;
  for (const ChannelPlan& c : ch)
    for (const ModePairPlan& mp : c.pairs) {
      total += sizeof(Real) * (mp.mw.size() + mp.nw.size());
      for (const KernelComp& kc : mp.comps)
        total += sizeof(Real) * kc.spec.size();
    }
  return total;
}

ConvolutionPlan make_plan(const VelocityGrid& g, const SSKernel& kernel,
                          const TermTable& table, const PlanOptions& opt) {
  ConvolutionPlan plan;
  plan.grid = g;
  plan.pad = fft_friendly_size(2 * g.n0);
  plan.fft = std::make_unique<Fft3>(plan.pad);
  const int n = g.n0;
  const int N = static_cast<int>(g.size());
  plan.v2 = ArrayX(N);
  for (int d = 0; d < 3; ++d) plan.vcomp[d] = ArrayX(N);
  std::vector<Real> anorm(N);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        const int i = g.flat(x, y, z);
        const Vec3 v = g.node(x, y, z);
        plan.v2[i] = v.squaredNorm();
        for (int d = 0; d < 3; ++d) plan.vcomp[d][i] = v[d];
        anorm[i] = v.norm();
      }
  plan.kernel_desc = kernel.describe();

  const int P = plan.pad;
  const Real inv_p3 = 1.0 / (static_cast<Real>(P) * P * P);
  const Real u_eps = kernel.u_eps();
  const int smax = 3 * (n - 1) * (n - 1);
  FftwBuf<Real> rtmp(plan.fft->real_count());
  FftwBuf<Cplx> ctmp(plan.fft->cplx_count());

  const std::vector<TermSpec> all_terms = table.all();
  for (int c = 0; c < 2; ++c) {
    ChannelPlan& cp = plan.ch[c];
    std::vector<TermSpec> terms;
    for (const TermSpec& t : all_terms)
      if (t.channel == c + 1) terms.push_back(t);
    cp.src_needed.assign(kNumSrc, 0);
    cp.active = !terms.empty() && channel_active(kernel, c + 1);
    if (!cp.active) continue;

    const ChannelLayout lay = build_layout(terms);
    cp.schedule = build_schedule(terms, lay, cp.src_needed);

    for (const PairSpec& ps : dedup_pairs(kernel, c + 1)) {
      ModePairPlan mp;
      mp.weight = ps.wt;
      const UnivariateBasis& L1 = kernel.expanded_L(c + 1, ps.e1);
      const UnivariateBasis& L2 = kernel.expanded_L(c + 1, ps.e2);
      const UnivariateBasis& M1 = kernel.expanded_M(c + 1, ps.e1);
      const UnivariateBasis& M2 = kernel.expanded_M(c + 1, ps.e2);
      const UnivariateBasis& N1 = kernel.expanded_N(c + 1, ps.e1);
      const UnivariateBasis& N2 = kernel.expanded_N(c + 1, ps.e2);
      mp.mw = ArrayX(N);
      mp.nw = ArrayX(N);
      for (int i = 0; i < N; ++i) {
        mp.mw[i] = ps.wt * M1(anorm[i]) * M2(anorm[i]);
        mp.nw[i] = N1(anorm[i]) * N2(anorm[i]);
      }
      std::vector<Real> kl(smax + 1);
      for (int s = 0; s <= smax; ++s) {
        const Real au = g.h * std::sqrt(static_cast<Real>(s));
        kl[s] = L1(au) * L2(au);
      }
      for (const auto& [kind, comp] : lay.comps) {
        KernelComp kc;
        kc.kind = kind;
        kc.comp = comp;
        kc.odd = beta_rank(kind) == 1;
        rtmp.fill_zero();
        for (int dx = -(n - 1); dx <= n - 1; ++dx)
          for (int dy = -(n - 1); dy <= n - 1; ++dy)
            for (int dz = -(n - 1); dz <= n - 1; ++dz) {
              const int s = dx * dx + dy * dy + dz * dz;
              Real val;
              if (s == 0) {
                val = opt.diag_value;
              } else {
                const Real au = g.h * std::sqrt(static_cast<Real>(s));
                if (au < u_eps) {
                  val = 0.0;
                } else {
                  const Vec3 u(g.h * dx, g.h * dy, g.h * dz);
                  val = kl[s] * beta_comp_value(kind, comp, u);
                }
              }
              const int px = (dx + P) % P, py = (dy + P) % P,
                        pz = (dz + P) % P;
              rtmp[(static_cast<std::size_t>(px) * P + py) * P + pz] =
                  val * inv_p3;
            }
        plan.fft->forward(rtmp.data, ctmp.data);
        kc.spec.resize(plan.fft->cplx_count());
        if (kc.odd)
          for (std::size_t i = 0; i < kc.spec.size(); ++i)
            kc.spec[i] = ctmp[i].imag();
        else
          for (std::size_t i = 0; i < kc.spec.size(); ++i)
            kc.spec[i] = ctmp[i].real();
        mp.comps.push_back(std::move(kc));
      }
      cp.pairs.push_back(std::move(mp));
    }
  }
  return plan;
}

VectorField collision_flux_fast(const ConvolutionPlan& plan,
                                const ScalarField& f, Real f_min) {
  const VelocityGrid& g = plan.grid;
  const int N = static_cast<int>(g.size());
  if (f.size() != N)
    throw std::invalid_argument("collision_flux_fast: field size mismatch");
  if (plan.fft == nullptr)
    throw std::invalid_argument("collision_flux_fast: empty plan");
  const Fft3& fft = *plan.fft;
  const int P = plan.pad;
  const std::size_t M = fft.cplx_count();

  const VectorField G = grad_log_floored(g, f, f_min);
  ArrayX vdotg = plan.vcomp[0] * G.comp[0] + plan.vcomp[1] * G.comp[1] +
                 plan.vcomp[2] * G.comp[2];

  VectorField acc = VectorField::zero(N);
  FftwBuf<Real> rbuf(fft.real_count());
  FftwBuf<Real> rout(fft.real_count());
  FftwBuf<Cplx> cacc(M);
  std::vector<FftwBuf<Cplx>> srcspec(kNumSrc);
  ArrayX ext(N);
  rbuf.fill_zero();

  for (int c = 0; c < 2; ++c) {
    const ChannelPlan& cp = plan.ch[c];
    if (!cp.active) continue;
    for (const ModePairPlan& mp : cp.pairs) {
      // source spectra for this mode pair
      ArrayX sq[3];
      sq[0] = mp.nw * f;
      sq[1] = plan.v2 * sq[0];
      sq[2] = plan.v2 * sq[1];
      auto forward_src = [&](int id, const ArrayX& field) {
        if (!cp.src_needed[id]) return;
        if (srcspec[id].count == 0) srcspec[id] = FftwBuf<Cplx>(M);
        embed_window(g, P, field, rbuf.data);
        fft.forward(rbuf.data, srcspec[id].data);
      };
      for (int q = 0; q < 3; ++q) {
        forward_src(src_s(q), sq[q]);
        for (int d = 0; d < 3; ++d)
          forward_src(src_t(q, d), ArrayX(sq[q] * G.comp[d]));
        if (q < 2) {
          for (int d = 0; d < 3; ++d)
            forward_src(src_q(q, d), ArrayX(sq[q] * plan.vcomp[d]));
          forward_src(src_z(q), ArrayX(sq[q] * vdotg));
        }
      }

      ArrayX wpa[3];
      wpa[0] = mp.mw;
      wpa[1] = mp.mw * plan.v2;
      wpa[2] = wpa[1] * plan.v2;

      for (const BucketSlot& slot : cp.schedule) {
        std::fill(cacc.data, cacc.data + M, Cplx(0, 0));
        for (const MacJob& job : slot.jobs) {
          const KernelComp& kc = mp.comps[job.comp];
          const Real* k = kc.spec.data();
          const Cplx* s = srcspec[job.src].data;
          Cplx* o = cacc.data;
          const Real cf = job.coeff;
          if (kc.odd) {
            for (std::size_t i = 0; i < M; ++i) {
              const Real kk = cf * k[i];
              o[i] += Cplx(-kk * s[i].imag(), kk * s[i].real());
            }
          } else {
            for (std::size_t i = 0; i < M; ++i) o[i] += (cf * k[i]) * s[i];
          }
        }
        fft.inverse(cacc.data, rout.data);
        extract_window(g, P, rout.data, ext);

        const ArrayX& w = wpa[slot.pa];
        switch (slot.kind) {
          case fastdetail::kMsym: {
            const int r = kSymRow[slot.comp], d = kSymCol[slot.comp];
            acc.comp[r] += w * ext * G.comp[d];
            if (r != d) acc.comp[d] += w * ext * G.comp[r];
            break;
          }
          case fastdetail::kMgen: {
            const int r = slot.comp / 3, d = slot.comp % 3;
            acc.comp[r] += w * ext * G.comp[d];
            break;
          }
          case fastdetail::kVg: {
            const ArrayX s = w * ext * G.comp[slot.comp];
            for (int r = 0; r < 3; ++r) acc.comp[r] += s * plan.vcomp[r];
            break;
          }
          case fastdetail::kVd:
            acc.comp[slot.comp] += w * ext;
            break;
          case fastdetail::kSc: {
            const ArrayX s = w * ext;
            for (int r = 0; r < 3; ++r) acc.comp[r] += s * plan.vcomp[r];
            break;
          }
          default:
            throw std::logic_error("collision_flux_fast: bad bucket kind");
        }
      }
    }
  }

  const Real h3 = g.h * g.h * g.h;
  VectorField p = VectorField::zero(N);
  for (int d = 0; d < 3; ++d) p.comp[d] = h3 * f * acc.comp[d];
  zero_boundary_layer(g, p);
  return p;
}

ScalarField collision_rhs_fast(const ConvolutionPlan& plan,
                               const ScalarField& f, Real f_min) {
  const VectorField p = collision_flux_fast(plan, f, f_min);
  return d_plus(plan.grid, p, ZeroExtend{});
}

}  // namespace sskinetic
