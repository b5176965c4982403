#pragma once

#include <cmath>
#include <limits>

#include "cgd/error.hpp"
#include "cgd/signal.hpp"

namespace cgd {

/// Grayscale peak used by PSNR.
inline constexpr double kPeakValue = 255.0;

/// (1/n) * ||x - xhat||^2.
template <typename A, typename B>
double mse(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& xhat) {
  require_same_length(x, xhat, "mse");
  if (x.size() == 0) throw DimensionError("mse: empty signals");
  return (x - xhat).squaredNorm() / static_cast<double>(x.size());
}

inline double mse(const Signal& x, const Signal& xhat) { return mse(x.values(), xhat.values()); }

/// 20 log10(255 / sqrt(mse)) in dB; +inf for a perfect reconstruction.
inline double psnr(double mse_value) {
  if (!(mse_value >= 0.0)) throw DomainError("psnr: mse must be nonnegative");
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(kPeakValue / std::sqrt(mse_value));
}

/// 20 log10(||clean|| / ||noise||) in dB.
template <typename A, typename B>
double measurement_snr(const Eigen::MatrixBase<A>& clean, const Eigen::MatrixBase<B>& noise) {
  require_same_length(clean, noise, "measurement_snr");
  const double signal_norm = clean.norm();
  const double noise_norm = noise.norm();
  if (noise_norm == 0.0) {
    if (signal_norm == 0.0) throw DegenerateInputError("measurement_snr: both norms are zero");
    return std::numeric_limits<double>::infinity();
  }
  if (signal_norm == 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(signal_norm / noise_norm);
}

/// (1/sqrt(n)) * ||x - ref||.
template <typename A, typename B>
double normalized_error(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& ref) {
  require_same_length(x, ref, "normalized_error");
  if (x.size() == 0) throw DimensionError("normalized_error: empty signals");
  return (x - ref).norm() / std::sqrt(static_cast<double>(x.size()));
}

struct QualityReport {
  double mse = 0.0;
  double psnr_db = 0.0;
  double snr_db = 0.0;
  double normalized_error = 0.0;
};

/// Reconstruction quality of `xhat` against `x`; `snr_db` is carried through
/// from the measurement stage since it is not a function of the two signals.
template <typename A, typename B>
QualityReport quality_report(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& xhat,
                             double snr_db) {
  QualityReport q;
  q.mse = mse(x, xhat);
  q.psnr_db = psnr(q.mse);
  q.snr_db = snr_db;
  q.normalized_error = normalized_error(x, xhat);
  return q;
}

}  // namespace cgd
