#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cgd/signal.hpp"

namespace cgd {

enum class OperatorKind {
  kGaussianUnit,   ///< i.i.d. N(0, sigma_a^2)
  kGaussianOverN,  ///< i.i.d. N(0, sigma_a^2 / n)
  kRademacher,     ///< i.i.d. +-sigma_a, equiprobable
  kPartialDct,     ///< m distinct rows of the n x n orthonormal DCT-II
};

std::string_view to_string(OperatorKind kind) noexcept;
OperatorKind parse_operator_kind(std::string_view name);

/// An m x n measurement ensemble.
///
/// Operators are fully determined by (kind, m, n, sigma_a, seed); only that
/// metadata (plus the selected DCT rows, for readability) is persisted, and the
/// entries are regenerated on load. Partial-DCT operators never materialize a
/// matrix: apply/adjoint run the transform and restrict/scatter the rows.
/// sigma_a is not used by partial-DCT operators and is recorded as 1.
class LinearOperator {
 public:
  static LinearOperator sample(OperatorKind kind, Eigen::Index m, Eigen::Index n, double sigma_a,
                               std::uint64_t seed);

  /// Wraps an explicit dense matrix (tests and tiny experiments, e.g. A = I).
  /// Reported as gaussian-unit metadata-less; not serializable.
  static LinearOperator from_dense(Matrix a);

  [[nodiscard]] Eigen::Index rows() const noexcept { return m_; }
  [[nodiscard]] Eigen::Index cols() const noexcept { return n_; }
  [[nodiscard]] OperatorKind kind() const noexcept { return kind_; }
  [[nodiscard]] double sigma_a() const noexcept { return sigma_a_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] bool is_explicit() const noexcept { return explicit_; }
  [[nodiscard]] std::span<const Eigen::Index> row_indices() const noexcept { return rows_; }

  /// y = A x.
  [[nodiscard]] Vector apply(const Eigen::Ref<const Vector>& x) const;
  /// A^T y.
  [[nodiscard]] Vector adjoint(const Eigen::Ref<const Vector>& y) const;

  /// Variance of a single entry: sigma_a^2, sigma_a^2/n, or 1/n for partial DCT.
  [[nodiscard]] double entry_variance() const noexcept;
  /// 1 / (m * entry_variance), the step size the convergence analysis prescribes.
  [[nodiscard]] double default_step() const noexcept;

  /// Dense copy of the operator.
  [[nodiscard]] Matrix dense() const;

  /// JSON metadata record; from_record regenerates the identical operator.
  [[nodiscard]] std::string to_record() const;
  static LinearOperator from_record(std::string_view record);

 private:
  LinearOperator() = default;

  OperatorKind kind_ = OperatorKind::kGaussianUnit;
  Eigen::Index m_ = 0;
  Eigen::Index n_ = 0;
  double sigma_a_ = 1.0;
  std::uint64_t seed_ = 0;
  bool explicit_ = false;
  Matrix matrix_;                    // random kinds
  std::vector<Eigen::Index> rows_;   // partial DCT, ascending
};

struct SpectralNormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Power-iteration estimate of sigma_max(A) as ||A v|| for the current unit
/// iterate v (hence never above the true value). The start vector is derived
/// from the operator seed so repeated calls agree.
SpectralNormEstimate spectral_norm(const LinearOperator& op, int max_iters = 1000, double tol = 1e-10);

struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

struct NoisyMeasurement {
  Vector y;
  Vector noise;
  double sigma_z = 0.0;  ///< scale applied to the standard-normal draw
};

/// y = y_clean + c g with g ~ N(0, I) and c chosen so that
/// 20 log10(||y_clean|| / ||c g||) equals snr_db.
NoisyMeasurement add_noise_at_snr(const Eigen::Ref<const Vector>& y_clean, const NoiseSpec& spec);

}  // namespace cgd
