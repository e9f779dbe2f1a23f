#pragma once

// Self-contained complex DFT used by the spectral module. Power-of-two
// lengths run through an iterative radix-2 transform with a direct twiddle
// table; every other length goes through the Bluestein chirp-z reduction to
// a power-of-two convolution, so all lengths stay O(N log N).
//
// Transforms here are plain unnormalized sums; callers apply the unitary
// 1/sqrt(N) scaling.

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace tomo::detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n < 2) return;
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // direct twiddle table keeps rounding flat across stages
  const double sgn = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    tw[k] = std::polar(1.0, sgn * 2.0 * std::numbers::pi * double(k) / double(n));
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * tw[k * stride];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

inline std::vector<std::complex<double>> dft_bluestein(
    const std::vector<std::complex<double>>& x, bool inverse) {
  const std::size_t n = x.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  const double sgn = inverse ? 1.0 : -1.0;
  // chirp[k] = exp(sgn * i * pi * k^2 / n); k^2 is reduced mod 2n (the phase
  // period) so the argument never grows
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k2 = (k * k) % (2 * n);
    chirp[k] = std::polar(1.0, sgn * std::numbers::pi * double(k2) / double(n));
  }
  std::vector<std::complex<double>> a(m), b(m);
  for (std::size_t i = 0; i < n; ++i) a[i] = x[i] * chirp[i];
  b[0] = std::conj(chirp[0]);
  for (std::size_t i = 1; i < n; ++i) b[i] = b[m - i] = std::conj(chirp[i]);
  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_pow2(a, true);
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = chirp[k] * a[k] / double(m);
  return out;
}

/// In-place DFT of arbitrary length, unnormalized.
inline void dft_inplace(std::vector<std::complex<double>>& x, bool inverse) {
  if (is_pow2(x.size()))
    fft_pow2(x, inverse);
  else
    x = dft_bluestein(x, inverse);
}

}  // namespace tomo::detail
