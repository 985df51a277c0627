#include "sskinetic/term_table.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sskinetic {

int beta_rank(BetaKind k) {
  switch (k) {
    case BetaKind::P:
    case BetaKind::U2P:
    case BetaKind::InvU2P:
    case BetaKind::UUT:
    case BetaKind::InvU4UUT:
      return 2;
    case BetaKind::UVec:
    case BetaKind::InvU2U:
      return 1;
    case BetaKind::One:
      return 0;
  }
  return 0;
}

Real beta_scalar(BetaKind k, const Vec3&) {
  if (k != BetaKind::One) throw std::logic_error("beta_scalar: rank mismatch");
  return 1.0;
}

Vec3 beta_vector(BetaKind k, const Vec3& u) {
  const Real u2 = u.squaredNorm();
  switch (k) {
    case BetaKind::UVec:
      return u;
    case BetaKind::InvU2U:
      return u2 > 0.0 ? Vec3(u / u2) : Vec3(Vec3::Zero());
    default:
      throw std::logic_error("beta_vector: rank mismatch");
  }
}

Mat3 beta_matrix(BetaKind k, const Vec3& u) {
  const Real u2 = u.squaredNorm();
  switch (k) {
    case BetaKind::P:
    case BetaKind::U2P:
    case BetaKind::InvU2P: {
      if (u2 == 0.0) return Mat3::Zero();
      Mat3 p = Mat3::Identity() - (u * u.transpose()) / u2;
      if (k == BetaKind::U2P) return Mat3(u2 * p);
      if (k == BetaKind::InvU2P) return Mat3(p / u2);
      return p;
    }
    case BetaKind::UUT:
      return u * u.transpose();
    case BetaKind::InvU4UUT:
      return u2 > 0.0 ? Mat3((u * u.transpose()) / (u2 * u2))
                      : Mat3(Mat3::Zero());
    default:
      throw std::logic_error("beta_matrix: rank mismatch");
  }
}

Mat3 term_matrix(const TermSpec& t, const Vec3& v, const Vec3& vp) {
  const Vec3 u = v - vp;
  Real s = t.coeff;
  for (int q = 0; q < t.alpha_pow; ++q) s *= v.squaredNorm();
  for (int q = 0; q < t.gamma_pow; ++q) s *= vp.squaredNorm();

  const bool row_alpha = t.row_owner == Owner::Alpha;
  const bool col_gamma = t.col_owner == Owner::Gamma;
  if (!row_alpha && !col_gamma) return s * beta_matrix(t.beta, u);
  if (row_alpha && !col_gamma)
    return s * (v * beta_vector(t.beta, u).transpose());
  if (!row_alpha && col_gamma)
    return s * (beta_vector(t.beta, u) * vp.transpose());
  return (s * beta_scalar(t.beta, u)) * (v * vp.transpose());
}

std::vector<TermSpec> TermTable::all() const {
  std::vector<TermSpec> out;
  out.reserve(i1.size() + i2.size() + i3.size());
  out.insert(out.end(), i1.begin(), i1.end());
  out.insert(out.end(), i2.begin(), i2.end());
  out.insert(out.end(), i3.begin(), i3.end());
  return out;
}

Mat3 table_sum(const std::vector<TermSpec>& terms, const Vec3& v,
               const Vec3& vp) {
  Mat3 acc = Mat3::Zero();
  for (const TermSpec& t : terms) acc += term_matrix(t, v, vp);
  return acc;
}

namespace {

TermSpec mat_term(int channel, int sign, Real coeff, int apow, BetaKind beta,
                  int gpow) {
  return TermSpec{channel, sign,  coeff,        apow,
                  false,   beta,  gpow,         false,
                  Owner::Beta,    Owner::Beta};
}

TermSpec ab_term(int channel, int sign, Real coeff, int apow, BetaKind beta,
                 int gpow) {
  // row owned by alpha (the v vector), column by the beta vector
  return TermSpec{channel, sign,  coeff,       apow,
                  true,    beta,  gpow,        false,
                  Owner::Alpha,   Owner::Beta};
}

TermSpec bg_term(int channel, int sign, Real coeff, int apow, BetaKind beta,
                 int gpow) {
  // row owned by the beta vector, column by gamma (the v' vector)
  return TermSpec{channel, sign,  coeff,       apow,
                  false,   beta,  gpow,        true,
                  Owner::Beta,    Owner::Gamma};
}

TermSpec ag_term(int channel, int sign, Real coeff, int apow, int gpow) {
  // rank-0 beta: the dyad v v'^T carries both indices
  return TermSpec{channel, sign,          coeff, apow,
                  true,    BetaKind::One, gpow,  true,
                  Owner::Alpha,           Owner::Gamma};
}

std::vector<TermSpec> make_i2_like(int channel, int sign) {
  std::vector<TermSpec> t;
  t.reserve(11);
  t.push_back(ab_term(channel, sign, 2.0, 0, BetaKind::UVec, 0));
  t.push_back(ag_term(channel, sign, 4.0, 0, 0));
  t.push_back(mat_term(channel, sign, -1.0, 0, BetaKind::UUT, 0));
  t.push_back(bg_term(channel, sign, -2.0, 0, BetaKind::UVec, 0));
  t.push_back(ab_term(channel, sign, -2.0, 1, BetaKind::InvU2U, 0));
  t.push_back(bg_term(channel, sign, -2.0, 1, BetaKind::InvU2U, 0));
  t.push_back(ab_term(channel, sign, 2.0, 0, BetaKind::InvU2U, 1));
  t.push_back(bg_term(channel, sign, 2.0, 0, BetaKind::InvU2U, 1));
  t.push_back(mat_term(channel, sign, 1.0, 2, BetaKind::InvU4UUT, 0));
  t.push_back(mat_term(channel, sign, -2.0, 1, BetaKind::InvU4UUT, 1));
  t.push_back(mat_term(channel, sign, 1.0, 0, BetaKind::InvU4UUT, 2));
  return t;
}

void validate_table(const TermTable& table) {
  std::mt19937_64 rng(0x7ab1e5u);
  std::normal_distribution<Real> gauss(0.0, 1.0);
  int checked = 0;
  while (checked < 200) {
    Vec3 v(gauss(rng), gauss(rng), gauss(rng));
    Vec3 vp(gauss(rng), gauss(rng), gauss(rng));
    const Vec3 u = v - vp;
    const Vec3 r = v + vp;
    const Real u2 = u.squaredNorm();
    // Skip ill-conditioned configurations: the identities hold everywhere,
    // but near-degenerate u or P r amplifies roundoff in the check itself.
    if (u2 < 0.25) continue;
    const Mat3 p = Mat3::Identity() - (u * u.transpose()) / u2;
    const Vec3 pr = p * r;
    if (pr.squaredNorm() < 0.25) continue;
    ++checked;

    const Mat3 target1 = pr.squaredNorm() * p;
    const Mat3 target2 = pr * pr.transpose();
    const Real err1 = (table_sum(table.i1, v, vp) - target1)
                          .cwiseAbs()
                          .maxCoeff() /
                      target1.cwiseAbs().maxCoeff();
    const Real err2 = (table_sum(table.i2, v, vp) - target2)
                          .cwiseAbs()
                          .maxCoeff() /
                      target2.cwiseAbs().maxCoeff();
    if (!(err1 <= 1e-12) || !(err2 <= 1e-12))
      throw std::logic_error("build_term_table: identity validation failed");
  }
}

}  // namespace

TermTable build_term_table() {
  TermTable table;
  table.i1.reserve(6);
  table.i1.push_back(mat_term(1, +1, 2.0, 1, BetaKind::P, 0));
  table.i1.push_back(mat_term(1, +1, 2.0, 0, BetaKind::P, 1));
  table.i1.push_back(mat_term(1, +1, -1.0, 0, BetaKind::U2P, 0));
  table.i1.push_back(mat_term(1, +1, -1.0, 2, BetaKind::InvU2P, 0));
  table.i1.push_back(mat_term(1, +1, 2.0, 1, BetaKind::InvU2P, 1));
  table.i1.push_back(mat_term(1, +1, -1.0, 0, BetaKind::InvU2P, 2));
  table.i2 = make_i2_like(2, +1);
  table.i3 = make_i2_like(1, -1);

  for (const TermSpec& t : table.all()) {
    const int rank = (t.alpha_vec ? 1 : 0) + beta_rank(t.beta) +
                     (t.gamma_vec ? 1 : 0);
    if (rank != 2) throw std::logic_error("build_term_table: bad term rank");
  }
  validate_table(table);
  return table;
}

}  // namespace sskinetic
