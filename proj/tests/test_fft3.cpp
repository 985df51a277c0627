#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sskinetic/fft3.hpp"

using namespace sskinetic;

TEST_SUITE("fft3") {
  TEST_CASE("fft_friendly_size picks the next 2^a 3^b 5^c") {
    CHECK(fft_friendly_size(1) == 1);
    CHECK(fft_friendly_size(16) == 16);
    CHECK(fft_friendly_size(17) == 18);
    CHECK(fft_friendly_size(24) == 24);
    CHECK(fft_friendly_size(25) == 25);
    CHECK(fft_friendly_size(31) == 32);
    CHECK(fft_friendly_size(33) == 36);
    CHECK(fft_friendly_size(97) == 100);
    CHECK(fft_friendly_size(129) == 135);
  }

  TEST_CASE("forward then inverse scales by n^3") {
    const int n = 12;
    Fft3 fft(n);
    FftwBuf<Real> in(fft.real_count()), out(fft.real_count());
    FftwBuf<Cplx> spec(fft.cplx_count());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<Real> u(-1, 1);
    for (std::size_t i = 0; i < in.count; ++i) in[i] = u(rng);
    std::vector<Real> saved(in.data, in.data + in.count);
    fft.forward(in.data, spec.data);
    fft.inverse(spec.data, out.data);
    const Real scale = static_cast<Real>(n) * n * n;
    Real err = 0;
    for (std::size_t i = 0; i < out.count; ++i)
      err = std::max(err, std::abs(out[i] / scale - saved[i]));
    CHECK(err <= 1e-12);
  }

  TEST_CASE("circular convolution with >=2n padding equals linear sum") {
    const int n0 = 4;
    const int P = fft_friendly_size(2 * n0);
    REQUIRE(P >= 2 * n0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<Real> u(-1, 1);
    std::vector<Real> a(n0 * n0 * n0), b(n0 * n0 * n0);
    for (Real& x : a) x = u(rng);
    for (Real& x : b) x = u(rng);

    Fft3 fft(P);
    FftwBuf<Real> ra(fft.real_count()), rb(fft.real_count()),
        rc(fft.real_count());
    FftwBuf<Cplx> ca(fft.cplx_count()), cb(fft.cplx_count());
    ra.fill_zero();
    rb.fill_zero();
    auto pflat = [&](int x, int y, int z) {
      return (static_cast<std::size_t>(x) * P + y) * P + z;
    };
    for (int x = 0; x < n0; ++x)
      for (int y = 0; y < n0; ++y)
        for (int z = 0; z < n0; ++z) {
          ra[pflat(x, y, z)] = a[(x * n0 + y) * n0 + z];
          rb[pflat(x, y, z)] = b[(x * n0 + y) * n0 + z];
        }
    fft.forward(ra.data, ca.data);
    fft.forward(rb.data, cb.data);
    for (std::size_t i = 0; i < ca.count; ++i) ca[i] *= cb[i];
    fft.inverse(ca.data, rc.data);
    const Real norm = static_cast<Real>(P) * P * P;

    // naive full linear convolution, wrapped into the padded box
    std::vector<Real> lin(fft.real_count(), 0.0);
    for (int x = 0; x < n0; ++x)
      for (int y = 0; y < n0; ++y)
        for (int z = 0; z < n0; ++z)
          for (int p = 0; p < n0; ++p)
            for (int q = 0; q < n0; ++q)
              for (int r = 0; r < n0; ++r) {
                const int dx = (x + p) % P, dy = (y + q) % P, dz = (z + r) % P;
                lin[pflat(dx, dy, dz)] +=
                    a[(x * n0 + y) * n0 + z] * b[(p * n0 + q) * n0 + r];
              }
    Real err = 0, scale = 0;
    for (std::size_t i = 0; i < lin.size(); ++i) {
      err = std::max(err, std::abs(rc[i] / norm - lin[i]));
      scale = std::max(scale, std::abs(lin[i]));
    }
    REQUIRE(scale > 0);
    CHECK(err <= 1e-12 * scale);
  }

  TEST_CASE("even fields have real spectra, odd fields imaginary") {
    // Parity is with respect to index negation mod P, the symmetry the
    // difference-grid kernel fields satisfy.
    const int P = 16;
    Fft3 fft(P);
    FftwBuf<Real> re(fft.real_count()), ro(fft.real_count());
    FftwBuf<Cplx> ce(fft.cplx_count()), co(fft.cplx_count());
    auto pflat = [&](int x, int y, int z) {
      return (static_cast<std::size_t>(x) * P + y) * P + z;
    };
    auto signed_coord = [&](int x) { return x <= P / 2 ? x : x - P; };
    for (int x = 0; x < P; ++x)
      for (int y = 0; y < P; ++y)
        for (int z = 0; z < P; ++z) {
          const Real ux = signed_coord(x), uy = signed_coord(y),
                     uz = signed_coord(z);
          // support kept off the Nyquist planes, as for difference-grid
          // fields with >= 2 N0 padding, so parity is exact
          const bool inside = std::abs(x - P / 2) >= 1 &&
                              std::abs(y - P / 2) >= 1 &&
                              std::abs(z - P / 2) >= 1;
          const Real gauss =
              inside ? std::exp(-(ux * ux + uy * uy + uz * uz) / 9.0) : 0.0;
          re[pflat(x, y, z)] = gauss;       // even under u -> -u
          ro[pflat(x, y, z)] = ux * gauss;  // odd
        }
    fft.forward(re.data, ce.data);
    fft.forward(ro.data, co.data);
    Real imax = 0, rmax = 0, iscale = 0;
    for (std::size_t i = 0; i < ce.count; ++i) {
      imax = std::max(imax, std::abs(ce[i].imag()));
      rmax = std::max(rmax, std::abs(co[i].real()));
      iscale = std::max(iscale, std::abs(ce[i]));
    }
    CHECK(imax <= 1e-12 * iscale);
    CHECK(rmax <= 1e-12 * iscale);
  }
}
