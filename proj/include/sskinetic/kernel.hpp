#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sskinetic/basis.hpp"
#include "sskinetic/types.hpp"

namespace sskinetic {

using KernelMatrix = Mat3;

/// Abstract pair kernel omega(v, v'): symmetric PSD 3x3 with omega.u = 0.
class PairKernel {
 public:
  virtual ~PairKernel() = default;
  virtual KernelMatrix eval(const Vec3& v, const Vec3& vp) const = 0;
  virtual std::string describe() const = 0;
};

/// One spectral-separation mode triplet per channel.
struct ModeTriplet {
  UnivariateBasis L;  // factor in |u|
  UnivariateBasis M;  // factor in |v|
  UnivariateBasis N;  // factor in |v'|
};

/**
 * Separable anisotropic non-stationary kernel
 *
 *   omega(v,v') = g1^2 |Pr|^2 P + (g2^2 - g1^2) P r r^T P,
 *   P = I - u u^T/|u|^2,  u = v - v',  r = v + v'  (mean velocity fixed to 0),
 *
 * with each channel's g expanded in separated univariate modes,
 *
 *   g_c(|u|,|v|,|v'|) = sum_{j'} L^{j'}(|u|) [ M^{j'}(|v|) N^{j'}(|v'|)
 *                                           + N^{j'}(|v|) M^{j'}(|v'|) ].
 *
 * The symmetrized pairing makes g invariant under |v| <-> |v'|. The expanded
 * mode list has J = 2J' entries: expanded mode 2j'-1 carries (L,M,N) and
 * expanded mode 2j' carries (L,N,M) of triplet j'.
 */
class SSKernel final : public PairKernel {
 public:
  SSKernel(std::vector<ModeTriplet> channel1, std::vector<ModeTriplet> channel2,
           Real u_eps = 0);

  KernelMatrix eval(const Vec3& v, const Vec3& vp) const override;
  std::string describe() const override;

  int jprime(int channel) const;  // channel in {1,2}
  int expanded_count(int channel) const { return 2 * jprime(channel); }
  /// Expanded mode j in 1..2J': the (L,M,N) triple described above.
  const UnivariateBasis& expanded_L(int channel, int j) const;
  const UnivariateBasis& expanded_M(int channel, int j) const;
  const UnivariateBasis& expanded_N(int channel, int j) const;

  const std::vector<ModeTriplet>& channel(int c) const;

  Real u_eps() const { return u_eps_; }
  void set_u_eps(Real e) { u_eps_ = e; }

  /// Flat tunable parameter vector over all channels/modes/bases, in order
  /// channel 1 modes then channel 2 modes, each mode L,M,N.
  std::vector<Real> parameters() const;
  void set_parameters(const std::vector<Real>& p);

  bool same_structure(const SSKernel& other) const;

 private:
  std::vector<ModeTriplet> ch_[2];
  Real u_eps_ = 0;
};

/// g_c(|u|,|v|,|v'|), the symmetrized separated sum. channel in {1,2}.
Real eval_g(const SSKernel& k, int channel, Real au, Real av, Real avp);

/// Separated form with P, r built from (v,v'); |u| < u_eps gives zero.
KernelMatrix eval_kernel_separated(const SSKernel& k, const Vec3& v,
                                   const Vec3& vp, Real u_eps);
KernelMatrix eval_kernel_separated(const SSKernel& k, const Vec3& v,
                                   const Vec3& vp);

/**
 * Geometric form omega = P (g_r^2 rt rt^T + g_s^2 st st^T) P with
 * rt = Pr/|Pr|, st = (u x r)/|u x r|, g_s^2 = g1^2 |Pr|^2, g_r^2 = g2^2 |Pr|^2.
 * Exists for cross-validation; throws on degenerate geometry
 * (|u| or |Pr| below u_eps).
 */
KernelMatrix eval_kernel_geometric(const SSKernel& k, const Vec3& v,
                                   const Vec3& vp, Real u_eps = 1e-12);

/// Component i of sum_j d omega_ij / d v_j by central differences (step delta).
Vec3 kernel_divergence_v(const PairKernel& k, const Vec3& v, const Vec3& vp,
                         Real delta = 1e-4);
Vec3 kernel_divergence_vprime(const PairKernel& k, const Vec3& v,
                              const Vec3& vp, Real delta = 1e-4);

/**
 * Max relative violations of the admissibility conditions over random pairs:
 * rotation equivariance, permutation symmetry, orthogonality to u,
 * positive semi-definiteness, and omega(v,v') = omega(-v,-v').
 */
struct AdmissibilityReport {
  Real rotation = 0;
  Real permutation = 0;
  Real orthogonality = 0;
  Real psd = 0;
  Real sign_symmetry = 0;

  Real worst() const;
};

AdmissibilityReport check_admissibility(const PairKernel& k, int sample_count,
                                        unsigned rng_seed);

/// omega = c * P / max(|u|, reg). Not separable; direct evaluator only.
class LandauLikeKernel final : public PairKernel {
 public:
  LandauLikeKernel(Real c, Real reg) : c_(c), reg_(reg) {}
  KernelMatrix eval(const Vec3& v, const Vec3& vp) const override;
  std::string describe() const override;

 private:
  Real c_, reg_;
};

/// omega = c * P. Not separable; direct evaluator only.
class ConstantPKernel final : public PairKernel {
 public:
  explicit ConstantPKernel(Real c) : c_(c) {}
  KernelMatrix eval(const Vec3& v, const Vec3& vp) const override;
  std::string describe() const override;

 private:
  Real c_;
};

/**
 * Exactly separable gaussian-mode kernel for oracle tests and baseline runs.
 * amp1/amp2 scale channels 1 and 2; amp2 = 0 drops the second channel
 * (rank-deficient transfer, no flux along the projected r direction).
 * Mode j' = 1 uses matching M and N widths; higher modes use distinct widths
 * so the asymmetric pairing is exercised.
 */
SSKernel gaussian_ss(int jprime, Real amp1 = 0.8, Real amp2 = 0.4);

/// Fitted-kernel JSON (versioned "format" field) round trip.
void save_kernel_json(const std::string& path, const SSKernel& k);
SSKernel load_kernel_json(const std::string& path);

}  // namespace sskinetic
