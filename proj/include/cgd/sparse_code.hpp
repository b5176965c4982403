#pragma once

#include <optional>

#include "cgd/code.hpp"

namespace cgd {

struct SparseQuantParams {
  Eigen::Index n = 1;
  Eigen::Index k = 1;
  int b = 1;                     ///< magnitude bits; each stored entry costs b + 1 bits with the sign
  std::optional<double> gamma;   ///< resolution exponent, when b was derived from it

  /// b = ceil(gamma log2 n + 0.5 log2 k), so that the distortion is at most n^-gamma.
  static SparseQuantParams from_gamma(Eigen::Index n, Eigen::Index k, double gamma);
};

struct SparseRateReport {
  std::uint64_t payload_bits = 0;
  /// (1+gamma) k log2 n + (k/2) log2 k + 2k; empty when gamma is unknown.
  std::optional<double> rate_bound;
  /// (k+1) log2 n + k (b+1), the bound the rate argument actually derives.
  double chained_rate_bound = 0.0;
};

SparseRateReport sparse_rate_report(const SparseQuantParams& p);

/// Quantized k-sparse code.
///
/// Keeps the k largest-magnitude entries (ties to the lowest index), clamps
/// them to [-1, 1] and stores each as (index, sign, magnitude bin) with
/// bin = min(floor(|u| 2^b), 2^b - 1), reconstructed at the bin midpoint.
/// The pair (sign = -, bin = 0) is reserved for "zero": it decodes to 0, so an
/// entry in (-2^-b, 0] decodes to 0 instead of -2^-(b+1). Zero entries are
/// placed on the lowest indices not taken by nonzero entries and entries are
/// stored in index order, which makes encode(decode(s)) == s for every stream
/// the encoder emits.
class SparseQuantCode final : public FixedLayoutCode {
 public:
  static constexpr std::uint16_t kTag = 0x0101;

  explicit SparseQuantCode(SparseQuantParams params);

  [[nodiscard]] std::string name() const override { return "sparse"; }
  [[nodiscard]] Eigen::Index length() const override { return p_.n; }
  [[nodiscard]] const SparseQuantParams& params() const noexcept { return p_; }

  [[nodiscard]] BitStream encode(const Eigen::Ref<const Vector>& x) const override;
  [[nodiscard]] Vector decode(const BitStream& bits) const override;

  [[nodiscard]] std::uint64_t payload_bits() const override;
  [[nodiscard]] std::uint16_t header_word() const override { return kTag; }
  /// 2^-b sqrt(k) on k-sparse signals with entries in [-1, 1].
  [[nodiscard]] double distortion_bound() const override;

  [[nodiscard]] unsigned index_bits() const noexcept { return index_bits_; }

 private:
  SparseQuantParams p_;
  unsigned index_bits_;
};

}  // namespace cgd
