#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cgd/bitstream.hpp"
#include "cgd/signal.hpp"

namespace cgd {

/// Lossy compression code (encoder f, decoder g). Its codebook is the image
/// of decode, and project(x) = decode(encode(x)) stands in for the Euclidean
/// projection onto that codebook.
class CompressionCode {
 public:
  virtual ~CompressionCode() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  /// Signal length n the code operates on.
  [[nodiscard]] virtual Eigen::Index length() const = 0;

  [[nodiscard]] virtual BitStream encode(const Eigen::Ref<const Vector>& x) const = 0;
  [[nodiscard]] virtual Vector decode(const BitStream& bits) const = 0;

  /// decode(encode(x)).
  [[nodiscard]] virtual Vector project(const Eigen::Ref<const Vector>& x) const;

  /// Payload size r in bits when it is fixed by the code parameters.
  [[nodiscard]] virtual std::optional<std::uint64_t> rate_bits() const = 0;
  /// Worst-case ||x - project(x)|| over the code's declared domain (+inf if unknown).
  [[nodiscard]] virtual double distortion_bound() const = 0;
};

/// Codes whose streams are a 16-bit header followed by a fixed-width payload.
class FixedLayoutCode : public CompressionCode {
 public:
  static constexpr unsigned kHeaderBits = 16;

  [[nodiscard]] std::optional<std::uint64_t> rate_bits() const override { return payload_bits(); }
  [[nodiscard]] virtual std::uint64_t payload_bits() const = 0;
  /// Tag (high byte) and layout version (low byte).
  [[nodiscard]] virtual std::uint16_t header_word() const = 0;

 protected:
  [[nodiscard]] BitStream start_stream() const;
  /// Checks header and total length; returns a reader positioned at the payload.
  void check_stream(const BitStream& bits, BitReader& reader) const;
};

/// code.project(x), with the length checked against the code.
Vector code_project(const CompressionCode& code, const Eigen::Ref<const Vector>& x);

/// Every distinct codeword of a fixed-layout code, by decoding all 2^payload
/// streams and discarding malformed ones. Ordered by stream value.
/// Throws SizeError when 2^payload exceeds `guard`.
std::vector<Vector> enumerate_codebook(const FixedLayoutCode& code, std::size_t guard = std::size_t{1} << 20);

}  // namespace cgd
