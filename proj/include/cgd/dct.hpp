#pragma once

#include "cgd/signal.hpp"

namespace cgd {

/// Orthonormal DCT-II: X_k = s_k * sum_j x_j cos(pi k (2j+1) / (2n)),
/// s_0 = sqrt(1/n), s_k = sqrt(2/n) otherwise. Dispatches to an FFT-based
/// evaluation for larger n and to the direct sum for small n.
Vector dct2(const Eigen::Ref<const Vector>& x);

/// Inverse (= transpose) of the orthonormal DCT-II, i.e. the orthonormal DCT-III.
Vector idct2(const Eigen::Ref<const Vector>& coeffs);

/// O(n^2) reference evaluations of the same transforms.
Vector dct2_direct(const Eigen::Ref<const Vector>& x);
Vector idct2_direct(const Eigen::Ref<const Vector>& coeffs);

/// FFT-based evaluations (Makhoul reordering), valid for every n >= 1.
Vector dct2_fft(const Eigen::Ref<const Vector>& x);
Vector idct2_fft(const Eigen::Ref<const Vector>& coeffs);

/// Explicit n x n orthonormal DCT-II matrix (row k is basis function k).
Matrix dct_matrix(Eigen::Index n);

}  // namespace cgd
