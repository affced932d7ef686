#pragma once

#include <complex>
#include <vector>

namespace aniso {

// In-place radix-2 complex FFT. n must be a power of two.
// inverse=true applies the conjugate transform without the 1/n factor.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

// 2D transform of an n-by-n row-major array, n a power of two.
void fft2(std::vector<std::complex<double>>& a, int n, bool inverse = false);

inline int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace aniso
