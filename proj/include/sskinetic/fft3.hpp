#pragma once

#include <complex>
#include <cstddef>

#include "sskinetic/types.hpp"

namespace sskinetic {

/// Smallest size >= n whose only prime factors are 2, 3, and 5.
int fft_friendly_size(int n);

using Cplx = std::complex<Real>;

/// Move-only buffer with FFT-library alignment (required so plans created on
/// one buffer can execute on another).
template <typename T>
struct FftwBuf {
  T* data = nullptr;
  std::size_t count = 0;

  FftwBuf() = default;
  explicit FftwBuf(std::size_t n);
  ~FftwBuf();
  FftwBuf(FftwBuf&& o) noexcept;
  FftwBuf& operator=(FftwBuf&& o) noexcept;
  FftwBuf(const FftwBuf&) = delete;
  FftwBuf& operator=(const FftwBuf&) = delete;

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }
  void fill_zero();
};

extern template struct FftwBuf<Real>;
extern template struct FftwBuf<Cplx>;

/**
 * Cubic n^3 real-to-complex transform pair. Transforms are unnormalized
 * (forward then inverse multiplies by n^3); callers fold the 1/n^3 where it
 * is cheapest. Execution on caller buffers is thread-safe; construction is
 * not. The inverse transform destroys its complex input.
 */
class Fft3 {
 public:
  explicit Fft3(int n);
  ~Fft3();
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  int n() const { return n_; }
  int nc() const { return nc_; }  // last-dimension complex count, n/2 + 1
  std::size_t real_count() const {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }
  std::size_t cplx_count() const {
    return static_cast<std::size_t>(n_) * n_ * nc_;
  }

  void forward(Real* in, Cplx* out) const;
  void inverse(Cplx* in, Real* out) const;

 private:
  int n_ = 0, nc_ = 0;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

}  // namespace sskinetic
