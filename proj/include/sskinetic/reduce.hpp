#pragma once

#include <cstddef>

#include "sskinetic/types.hpp"

namespace sskinetic {

/// Compensated (Kahan) summation. Discrete moments and normalizations are
/// compared at the 1e-12..1e-15 level on ~1e5-node fields, where plain
/// accumulation roundoff would already show.
struct KahanAccumulator {
  Real sum = 0;
  Real carry = 0;

  void add(Real x) {
    const Real y = x - carry;
    const Real t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

inline Real kahan_sum(const Real* x, std::ptrdiff_t n) {
  KahanAccumulator acc;
  for (std::ptrdiff_t i = 0; i < n; ++i) acc.add(x[i]);
  return acc.sum;
}

inline Real kahan_sum(const ArrayX& a) { return kahan_sum(a.data(), a.size()); }

}  // namespace sskinetic
