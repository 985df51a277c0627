#pragma once

#include <vector>

#include "sskinetic/types.hpp"

namespace sskinetic {

/// Shape of the u-dependent factor of a bracket term.
enum class BetaKind {
  P,         // projector I - u u^T/|u|^2            (symmetric matrix)
  U2P,       // |u|^2 P                              (symmetric matrix)
  InvU2P,    // |u|^-2 P                             (symmetric matrix)
  UVec,      // u                                    (vector)
  InvU2U,    // |u|^-2 u                             (vector)
  UUT,       // u u^T                                (symmetric matrix)
  InvU4UUT,  // |u|^-4 u u^T                         (symmetric matrix)
  One,       // 1                                    (scalar)
};

enum class Owner { Alpha, Beta, Gamma };

int beta_rank(BetaKind k);  // 2 matrix, 1 vector, 0 scalar

/// Singular kinds carry value 0 at u = 0 by convention.
Real beta_scalar(BetaKind k, const Vec3& u);
Vec3 beta_vector(BetaKind k, const Vec3& u);
Mat3 beta_matrix(BetaKind k, const Vec3& u);

/**
 * One bracket term {alpha(v), beta(u), gamma(v')} of the expanded collision
 * integrals. alpha = |v|^(2 alpha_pow) (times v when alpha_vec), gamma =
 * |v'|^(2 gamma_pow) (times v' when gamma_vec). The composite is always a
 * 3x3 matrix whose row index belongs to alpha or beta and whose column index
 * belongs to beta or gamma; tensor ranks of the three factors sum to 2.
 */
struct TermSpec {
  int channel;   // 1 or 2: which g_* squared multiplies the term
  int sign;      // +1 or -1
  Real coeff;
  int alpha_pow;
  bool alpha_vec;
  BetaKind beta;
  int gamma_pow;
  bool gamma_vec;
  Owner row_owner;
  Owner col_owner;
};

/// Composite 3x3 matrix alpha(v) beta(u) gamma(v') of one term, u = v - v'.
Mat3 term_matrix(const TermSpec& t, const Vec3& v, const Vec3& vp);

struct TermTable {
  std::vector<TermSpec> i1;  // 6 terms, channel 1, sign +
  std::vector<TermSpec> i2;  // 11 terms, channel 2, sign +
  std::vector<TermSpec> i3;  // 11 terms, channel 1, sign -

  std::vector<TermSpec> all() const;
};

/// Sum of composite matrices over one sub-table (sign and channel ignored).
Mat3 table_sum(const std::vector<TermSpec>& terms, const Vec3& v,
               const Vec3& vp);

/**
 * The 28 hard-coded terms of the operator expansion. Construction validates
 * both closed-form identities on random non-degenerate pairs —
 * I1 sums to |Pr|^2 P and I2 sums to P r r^T P — and throws std::logic_error
 * on failure (a transcription bug, not a runtime condition).
 */
TermTable build_term_table();

}  // namespace sskinetic
