#include "aniso/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace aniso {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

void fft2(std::vector<std::complex<double>>& a, int n, bool inverse) {
  if (static_cast<std::size_t>(n) * n != a.size())
    throw std::invalid_argument("fft2: size mismatch");
  std::vector<std::complex<double>> row(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) row[j] = a[static_cast<std::size_t>(i) * n + j];
    fft(row, inverse);
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i) * n + j] = row[j];
  }
  std::vector<std::complex<double>> col(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[i] = a[static_cast<std::size_t>(i) * n + j];
    fft(col, inverse);
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + j] = col[i];
  }
}

}  // namespace aniso
