#pragma once

#include <optional>
#include <vector>

#include "cgd/code.hpp"
#include "cgd/polyfit.hpp"

namespace cgd {

struct PiecewisePolyParams {
  Eigen::Index n = 1;
  int max_degree = 0;         ///< N
  int max_singularities = 0;  ///< Q
  int b = 1;                  ///< bits per coefficient
  std::optional<double> gamma;

  /// b = ceil((gamma + 0.5) log2 n + log2(N + 1)), so that the distortion is at most n^-gamma.
  static PiecewisePolyParams from_gamma(Eigen::Index n, int max_degree, int max_singularities, double gamma);
};

struct PolyRateReport {
  std::uint64_t payload_bits = 0;
  /// (N+1)(Q+1) b + Q (log2 n + 1).
  double rate_bound = 0.0;
  /// ((gamma+0.5)(N+1)(Q+1) + Q) log2 n + (N+1)(Q+1)(log2(N+1) + 1) + 1; empty without gamma.
  std::optional<double> gamma_rate_bound;
};

PolyRateReport poly_rate_report(const PiecewisePolyParams& p);

/// Quantizes coefficients in [0,1] with sum <= 1 onto the grid j / 2^b,
/// j = 0..2^b-1, by rounding to the nearest level. If rounding up pushed the
/// sum above 1, the rounded-up entries with the largest excess are lowered one
/// level until it is not. Every level error is below 2^-b.
std::vector<std::uint64_t> quantize_coefficients(const Eigen::Ref<const Vector>& a, int b);

/// Piecewise-polynomial code.
///
/// Stream: 16-bit header, Q singularity slots of ceil(log2 n) + 1 bits (unused
/// slots hold n), then (N+1)(Q+1) coefficient levels of b bits, segment-major;
/// unused segments store zeros. Encoding projects onto the polynomial class
/// with viterbi_segmentation before quantizing.
class PiecewisePolyCode final : public FixedLayoutCode {
 public:
  static constexpr std::uint16_t kTag = 0x0201;

  explicit PiecewisePolyCode(PiecewisePolyParams params);

  [[nodiscard]] std::string name() const override { return "poly"; }
  [[nodiscard]] Eigen::Index length() const override { return p_.n; }
  [[nodiscard]] const PiecewisePolyParams& params() const noexcept { return p_; }

  [[nodiscard]] BitStream encode(const Eigen::Ref<const Vector>& x) const override;
  [[nodiscard]] Vector decode(const BitStream& bits) const override;

  [[nodiscard]] std::uint64_t payload_bits() const override;
  [[nodiscard]] std::uint16_t header_word() const override { return kTag; }
  /// sqrt(n) (N+1) 2^-b on the class of sampled piecewise polynomials.
  [[nodiscard]] double distortion_bound() const override;

  /// Segmentation carried by a stream (quantized coefficients).
  [[nodiscard]] Segmentation read_segmentation(const BitStream& bits) const;

 private:
  static constexpr int kCanonicalRounds = 8;
  [[nodiscard]] BitStream encode_once(const Eigen::Ref<const Vector>& x) const;

  PiecewisePolyParams p_;
  unsigned split_bits_;
};

}  // namespace cgd
