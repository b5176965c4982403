#include "cgd/dct.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <numbers>
#include <vector>

namespace cgd {

namespace {

constexpr Eigen::Index kDirectCutoff = 32;

double basis_scale(Eigen::Index k, Eigen::Index n) {
  return std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
}

}  // namespace

Matrix dct_matrix(Eigen::Index n) {
  Matrix d(n, n);
  const double nn = static_cast<double>(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double s = basis_scale(k, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      d(k, j) = s * std::cos(std::numbers::pi * static_cast<double>(k) * (2.0 * static_cast<double>(j) + 1.0) / (2.0 * nn));
    }
  }
  return d;
}

Vector dct2_direct(const Eigen::Ref<const Vector>& x) { return dct_matrix(x.size()) * x; }

Vector idct2_direct(const Eigen::Ref<const Vector>& coeffs) {
  return dct_matrix(coeffs.size()).transpose() * coeffs;
}

Vector dct2_fft(const Eigen::Ref<const Vector>& x) {
  const Eigen::Index n = x.size();
  if (n <= 1) return x;  // kissfft does not handle length 1
  const double nn = static_cast<double>(n);
  // Even samples ascending, odd samples descending.
  std::vector<double> v(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; 2 * j < n; ++j) v[static_cast<std::size_t>(j)] = x(2 * j);
  for (Eigen::Index j = 0; 2 * j + 1 < n; ++j) v[static_cast<std::size_t>(n - 1 - j)] = x(2 * j + 1);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, v);

  Vector out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double phase = -std::numbers::pi * static_cast<double>(k) / (2.0 * nn);
    const std::complex<double> twiddle(std::cos(phase), std::sin(phase));
    out(k) = basis_scale(k, n) * (twiddle * spectrum[static_cast<std::size_t>(k)]).real();
  }
  return out;
}

Vector idct2_fft(const Eigen::Ref<const Vector>& coeffs) {
  const Eigen::Index n = coeffs.size();
  if (n <= 1) return coeffs;
  const double nn = static_cast<double>(n);
  // Unnormalized DCT-II coefficients C_k of the sought signal: x = (1/n)(C_0 + 2 sum C_k cos(..)).
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = nn * basis_scale(0, n) * coeffs(0);
  for (Eigen::Index k = 1; k < n; ++k) c[static_cast<std::size_t>(k)] = 0.5 * nn * basis_scale(k, n) * coeffs(k);

  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const double phase = std::numbers::pi * static_cast<double>(k) / (2.0 * nn);
    const std::complex<double> twiddle(std::cos(phase), std::sin(phase));
    const double mirrored = k == 0 ? 0.0 : c[static_cast<std::size_t>(n - k)];
    spectrum[static_cast<std::size_t>(k)] = twiddle * std::complex<double>(c[static_cast<std::size_t>(k)], -mirrored);
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> v;
  fft.inv(v, spectrum);

  Vector x(n);
  for (Eigen::Index j = 0; 2 * j < n; ++j) x(2 * j) = v[static_cast<std::size_t>(j)].real();
  for (Eigen::Index j = 0; 2 * j + 1 < n; ++j) x(2 * j + 1) = v[static_cast<std::size_t>(n - 1 - j)].real();
  return x;
}

Vector dct2(const Eigen::Ref<const Vector>& x) {
  return x.size() <= kDirectCutoff ? dct2_direct(x) : dct2_fft(x);
}

Vector idct2(const Eigen::Ref<const Vector>& coeffs) {
  return coeffs.size() <= kDirectCutoff ? idct2_direct(coeffs) : idct2_fft(coeffs);
}

}  // namespace cgd
