#include "sskinetic/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace sskinetic {

UnivariateBasis UnivariateBasis::gaussian_sum(std::vector<Real> amplitudes,
                                              std::vector<Real> widths,
                                              Real x_max) {
  if (amplitudes.empty() || amplitudes.size() != widths.size())
    throw std::invalid_argument(
        "gaussian_sum: amplitudes and widths must be nonempty and equal size");
  for (Real w : widths)
    if (!(w > 0))
      throw std::invalid_argument("gaussian_sum: widths must be positive");
  if (!(x_max > 0))
    throw std::invalid_argument("gaussian_sum: x_max must be positive");
  UnivariateBasis b;
  b.family_ = BasisFamily::GaussianSum;
  b.x_max_ = x_max;
  b.amplitudes_ = std::move(amplitudes);
  b.widths_ = std::move(widths);
  return b;
}

UnivariateBasis UnivariateBasis::cubic_spline(std::vector<Real> knot_values,
                                              Real x_max) {
  if (knot_values.size() < 4)
    throw std::invalid_argument("cubic_spline: need at least 4 knot values");
  if (!(x_max > 0))
    throw std::invalid_argument("cubic_spline: x_max must be positive");
  UnivariateBasis b;
  b.family_ = BasisFamily::CubicSpline;
  b.x_max_ = x_max;
  b.knot_values_ = std::move(knot_values);
  b.knot_dx_ = x_max / Real(b.knot_values_.size() - 1);
  b.rebuild_spline();
  return b;
}

UnivariateBasis UnivariateBasis::constant(Real value, Real x_max) {
  UnivariateBasis b;
  b.family_ = BasisFamily::Constant;
  b.x_max_ = x_max;
  b.constant_ = value;
  return b;
}

void UnivariateBasis::rebuild_spline() {
  // Natural cubic spline second derivatives on uniform knots (Thomas solve).
  const int n = int(knot_values_.size());
  spline_m_.assign(n, 0.0);
  if (n < 3) return;
  const Real dx = knot_dx_;
  std::vector<Real> diag(n - 2, 4.0), rhs(n - 2);
  for (int i = 1; i <= n - 2; ++i)
    rhs[i - 1] = 6.0 *
                 (knot_values_[i + 1] - 2 * knot_values_[i] +
                  knot_values_[i - 1]) /
                 (dx * dx);
  for (int i = 1; i < n - 2; ++i) {
    const Real w = 1.0 / diag[i - 1];
    diag[i] -= w;
    rhs[i] -= w * rhs[i - 1];
  }
  for (int i = n - 3; i >= 0; --i) {
    Real acc = rhs[i];
    if (i + 1 <= n - 3) acc -= spline_m_[i + 2];
    spline_m_[i + 1] = acc / diag[i];
  }
}

Real UnivariateBasis::operator()(Real x) const {
  switch (family_) {
    case BasisFamily::Constant:
      return constant_;
    case BasisFamily::GaussianSum: {
      Real s = 0;
      for (std::size_t q = 0; q < amplitudes_.size(); ++q) {
        const Real t = x / widths_[q];
        s += amplitudes_[q] * std::exp(-t * t);
      }
      return s;
    }
    case BasisFamily::CubicSpline: {
      const int n = int(knot_values_.size());
      if (x <= 0) return knot_values_.front();
      if (x >= x_max_) return knot_values_.back();
      const Real t = x / knot_dx_;
      int i = int(t);
      if (i > n - 2) i = n - 2;
      const Real a = (i + 1 - t);
      const Real b = (t - i);
      const Real dx2 = knot_dx_ * knot_dx_ / 6.0;
      return a * knot_values_[i] + b * knot_values_[i + 1] +
             ((a * a * a - a) * spline_m_[i] + (b * b * b - b) * spline_m_[i + 1]) *
                 dx2;
    }
  }
  return 0;
}

std::vector<Real> UnivariateBasis::parameters() const {
  switch (family_) {
    case BasisFamily::Constant:
      return {constant_};
    case BasisFamily::GaussianSum: {
      std::vector<Real> p = amplitudes_;
      p.insert(p.end(), widths_.begin(), widths_.end());
      return p;
    }
    case BasisFamily::CubicSpline:
      return knot_values_;
  }
  return {};
}

void UnivariateBasis::set_parameters(const std::vector<Real>& p) {
  if (p.size() != parameters().size())
    throw std::invalid_argument("set_parameters: wrong parameter count");
  switch (family_) {
    case BasisFamily::Constant:
      constant_ = p[0];
      break;
    case BasisFamily::GaussianSum: {
      const std::size_t q = amplitudes_.size();
      for (std::size_t i = 0; i < q; ++i) {
        amplitudes_[i] = p[i];
        if (!(p[q + i] > 0))
          throw std::invalid_argument("set_parameters: widths must stay positive");
        widths_[i] = p[q + i];
      }
      break;
    }
    case BasisFamily::CubicSpline:
      knot_values_ = p;
      rebuild_spline();
      break;
  }
}

bool UnivariateBasis::operator==(const UnivariateBasis& other) const {
  return family_ == other.family_ && x_max_ == other.x_max_ &&
         amplitudes_ == other.amplitudes_ && widths_ == other.widths_ &&
         knot_values_ == other.knot_values_ && constant_ == other.constant_;
}

std::string UnivariateBasis::family_name() const {
  switch (family_) {
    case BasisFamily::GaussianSum:
      return "gaussian_sum";
    case BasisFamily::CubicSpline:
      return "cubic_spline";
    case BasisFamily::Constant:
      return "constant";
  }
  return "unknown";
}

}  // namespace sskinetic
