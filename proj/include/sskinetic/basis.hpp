#pragma once

#include <string>
#include <vector>

#include "sskinetic/types.hpp"

namespace sskinetic {

enum class BasisFamily { GaussianSum, CubicSpline, Constant };

/**
 * Univariate radial basis function on [0, x_max].
 *
 * gaussian-sum : f(x) = sum_q a_q * exp(-(x/w_q)^2), natural decay beyond x_max.
 * cubic-spline : natural cubic spline through values at uniform knots on
 *                [0, x_max], extended by its last value beyond x_max.
 * constant     : fixed value everywhere.
 *
 * Instances are immutable after construction except through set_parameters,
 * which replaces the tunable parameter vector (used by kernel fitting).
 */
class UnivariateBasis {
 public:
  /// amplitudes and widths must have equal size; widths strictly positive.
  static UnivariateBasis gaussian_sum(std::vector<Real> amplitudes,
                                      std::vector<Real> widths,
                                      Real x_max = 24.0);
  /// knot_values are spline values at uniform knots on [0, x_max]; size >= 4.
  static UnivariateBasis cubic_spline(std::vector<Real> knot_values,
                                      Real x_max);
  static UnivariateBasis constant(Real value, Real x_max = 24.0);

  Real operator()(Real x) const;

  BasisFamily family() const { return family_; }
  Real x_max() const { return x_max_; }

  /// Tunable parameters: gaussian-sum = amplitudes then widths;
  /// cubic-spline = knot values; constant = the value.
  std::vector<Real> parameters() const;
  void set_parameters(const std::vector<Real>& p);

  bool operator==(const UnivariateBasis& other) const;

  std::string family_name() const;

 private:
  UnivariateBasis() = default;
  void rebuild_spline();

  BasisFamily family_ = BasisFamily::Constant;
  Real x_max_ = 0;
  std::vector<Real> amplitudes_;
  std::vector<Real> widths_;
  std::vector<Real> knot_values_;
  std::vector<Real> spline_m_;  // second derivatives at knots
  Real knot_dx_ = 0;
  Real constant_ = 0;
};

}  // namespace sskinetic
