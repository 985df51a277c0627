#include "sskinetic/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sskinetic/reduce.hpp"

namespace sskinetic::analysis {
namespace {

constexpr Real kEpsilon0 = 8.8541878128e-12;  // F/m
constexpr Real kBoltzmann = 1.380649e-23;     // J/K

void check_field(const VelocityGrid& g, const ScalarField& f,
                 const char* where) {
  if (f.size() != g.size())
    throw std::invalid_argument(std::string(where) + ": field size mismatch");
}

const int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                          {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

}  // namespace

Moments moments(const VelocityGrid& g, const ScalarField& f) {
  check_field(g, f, "moments");
  KahanAccumulator mass, px, py, pz, en;
  for (int i1 = 0; i1 < g.n0; ++i1) {
    const Real x = g.coord(i1);
    for (int i2 = 0; i2 < g.n0; ++i2) {
      const Real y = g.coord(i2);
      std::int64_t at = g.flat(i1, i2, 0);
      for (int i3 = 0; i3 < g.n0; ++i3, ++at) {
        const Real z = g.coord(i3);
        const Real w = f[at];
        mass.add(w);
        px.add(x * w);
        py.add(y * w);
        pz.add(z * w);
        en.add((x * x + y * y + z * z) * w);
      }
    }
  }
  const Real h3 = g.h * g.h * g.h;
  Moments m;
  m.mass = h3 * mass.sum;
  m.momentum = Vec3(h3 * px.sum, h3 * py.sum, h3 * pz.sum);
  m.energy = Real(0.5) * h3 * en.sum;
  return m;
}

Real entropy(const VelocityGrid& g, const ScalarField& f, Real f_min) {
  check_field(g, f, "entropy");
  KahanAccumulator s;
  for (std::int64_t i = 0; i < f.size(); ++i)
    s.add(f[i] * std::log(std::max(f[i], f_min)));
  return -g.h * g.h * g.h * s.sum;
}

RelativeErrors relative_errors(const VelocityGrid& coarse,
                               const ScalarField& f, const VelocityGrid& ref,
                               const ScalarField& f_ref) {
  check_field(coarse, f, "relative_errors");
  check_field(ref, f_ref, "relative_errors");
  if (std::abs(coarse.L - ref.L) >
      Real(1e-12) * std::max(std::abs(coarse.L), std::abs(ref.L)))
    throw std::invalid_argument("relative_errors: grids span different boxes");
  if (coarse.n0 <= 0 || ref.n0 % coarse.n0 != 0)
    throw std::invalid_argument(
        "relative_errors: reference n0 must be an integer multiple of the "
        "coarse n0 (non-nested grids are rejected)");
  const int ratio = ref.n0 / coarse.n0;

  KahanAccumulator num1, den1, num2, den2;
  Real numi = 0, deni = 0;
  for (int i1 = 0; i1 < coarse.n0; ++i1)
    for (int i2 = 0; i2 < coarse.n0; ++i2)
      for (int i3 = 0; i3 < coarse.n0; ++i3) {
        const Real a = f[coarse.flat(i1, i2, i3)];
        const Real b = f_ref[ref.flat(ratio * i1, ratio * i2, ratio * i3)];
        const Real d = a - b;
        num1.add(std::abs(d));
        den1.add(std::abs(b));
        num2.add(d * d);
        den2.add(b * b);
        numi = std::max(numi, std::abs(d));
        deni = std::max(deni, std::abs(b));
      }
  if (!(den1.sum > 0))
    throw std::invalid_argument(
        "relative_errors: reference vanishes on the coincident nodes");
  RelativeErrors e;
  e.l1 = num1.sum / den1.sum;
  e.l2 = std::sqrt(num2.sum / den2.sum);
  e.linf = numi / deni;
  return e;
}

std::vector<RadialBin> radial_profile(const VelocityGrid& g,
                                      const ScalarField& f, Real bin_width) {
  check_field(g, f, "radial_profile");
  const Real w = bin_width > 0 ? bin_width : g.h;
  const Real rmax = std::sqrt(Real(3)) * g.L / 2;
  const int nbins = int(rmax / w) + 2;
  std::vector<KahanAccumulator> sums(nbins);
  std::vector<std::int64_t> counts(nbins, 0);
  for (std::int64_t i = 0; i < f.size(); ++i) {
    const Real r = g.node(i).norm();
    const int k = std::min(int(r / w), nbins - 1);
    sums[k].add(f[i]);
    ++counts[k];
  }
  std::vector<RadialBin> out;
  for (int k = 0; k < nbins; ++k) {
    if (counts[k] == 0) continue;
    out.push_back({(Real(k) + Real(0.5)) * w, sums[k].sum / Real(counts[k]),
                   counts[k]});
  }
  return out;
}

Real cubic_symmetry_deviation(const VelocityGrid& g, const ScalarField& f) {
  check_field(g, f, "cubic_symmetry_deviation");
  const Real scale = f.abs().maxCoeff();
  if (!(scale > 0)) return 0;
  const int n0 = g.n0;
  Real dev = 0;
  int idx[3];
  for (const auto& perm : kPerms)
    for (int sign_bits = 0; sign_bits < 8; ++sign_bits) {
      for (int i1 = 1; i1 < n0; ++i1)
        for (int i2 = 1; i2 < n0; ++i2)
          for (int i3 = 1; i3 < n0; ++i3) {
            const int src[3] = {i1, i2, i3};
            for (int d = 0; d < 3; ++d) {
              const int j = src[perm[d]];
              idx[d] = (sign_bits >> d) & 1 ? n0 - j : j;
            }
            const Real diff = std::abs(f[g.flat(idx[0], idx[1], idx[2])] -
                                       f[g.flat(i1, i2, i3)]);
            dev = std::max(dev, diff);
          }
    }
  return dev / scale;
}

Real coupling_parameter(const PhysicalParams& p) {
  if (!(p.density > 0) || !(p.temperature > 0))
    throw std::invalid_argument(
        "coupling_parameter: density and temperature must be positive");
  const Real pi = std::numbers::pi_v<Real>;
  const Real a = std::cbrt(Real(3) / (Real(4) * pi * p.density));
  return p.charge * p.charge /
         (Real(4) * pi * kEpsilon0 * kBoltzmann * p.temperature * a);
}

CharacteristicScales characteristic_scales(const PhysicalParams& p) {
  if (!(p.density > 0) || !(p.mass > 0))
    throw std::invalid_argument(
        "characteristic_scales: density and mass must be positive");
  const Real pi = std::numbers::pi_v<Real>;
  CharacteristicScales s;
  s.length = std::cbrt(Real(3) / (Real(4) * pi * p.density));
  s.plasma_frequency =
      std::sqrt(p.density * p.charge * p.charge / (p.mass * kEpsilon0));
  s.velocity = s.length * s.plasma_frequency;
  s.time = Real(1) / s.plasma_frequency;
  return s;
}

}  // namespace sskinetic::analysis
