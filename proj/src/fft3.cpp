#include "sskinetic/fft3.hpp"

#include <fftw3.h>

#include <algorithm>
#include <stdexcept>

namespace sskinetic {

int fft_friendly_size(int n) {
  if (n < 1) throw std::invalid_argument("fft_friendly_size: n < 1");
  for (int cand = n;; ++cand) {
    int m = cand;
    for (int p : {2, 3, 5})
      while (m % p == 0) m /= p;
    if (m == 1) return cand;
  }
}

template <typename T>
FftwBuf<T>::FftwBuf(std::size_t n) : count(n) {
  data = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (data == nullptr) throw std::bad_alloc();
}

template <typename T>
FftwBuf<T>::~FftwBuf() {
  if (data != nullptr) fftw_free(data);
}

template <typename T>
FftwBuf<T>::FftwBuf(FftwBuf&& o) noexcept : data(o.data), count(o.count) {
  o.data = nullptr;
  o.count = 0;
}

template <typename T>
FftwBuf<T>& FftwBuf<T>::operator=(FftwBuf&& o) noexcept {
  if (this != &o) {
    if (data != nullptr) fftw_free(data);
    data = o.data;
    count = o.count;
    o.data = nullptr;
    o.count = 0;
  }
  return *this;
}

template <typename T>
void FftwBuf<T>::fill_zero() {
  std::fill(data, data + count, T());
}

template struct FftwBuf<Real>;
template struct FftwBuf<Cplx>;

Fft3::Fft3(int n) : n_(n), nc_(n / 2 + 1) {
  if (n < 2) throw std::invalid_argument("Fft3: n < 2");
  FftwBuf<Real> r(real_count());
  FftwBuf<Cplx> c(cplx_count());
  fwd_ = fftw_plan_dft_r2c_3d(n_, n_, n_, r.data,
                              reinterpret_cast<fftw_complex*>(c.data),
                              FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_3d(n_, n_, n_,
                              reinterpret_cast<fftw_complex*>(c.data), r.data,
                              FFTW_ESTIMATE);
  if (fwd_ == nullptr || inv_ == nullptr)
    throw std::runtime_error("Fft3: plan creation failed");
}

Fft3::~Fft3() {
  if (fwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (inv_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void Fft3::forward(Real* in, Cplx* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), in,
                       reinterpret_cast<fftw_complex*>(out));
}

void Fft3::inverse(Cplx* in, Real* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_),
                       reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace sskinetic
