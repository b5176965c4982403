#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cgd {

/// Packed bit sequence. Fields are written most-significant bit first.
class BitStream {
 public:
  BitStream() = default;
  BitStream(std::vector<std::uint8_t> bytes, std::size_t bit_count);

  [[nodiscard]] std::size_t size_bits() const noexcept { return bit_count_; }
  [[nodiscard]] const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  [[nodiscard]] bool bit(std::size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1U; }

  void push_bit(bool b);
  /// Appends the low `width` bits of `value` (width <= 64).
  void push(std::uint64_t value, unsigned width);

  friend bool operator==(const BitStream&, const BitStream&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bit_count_ = 0;
};

/// Sequential reader; throws DecodeError on overrun.
class BitReader {
 public:
  explicit BitReader(const BitStream& stream) : stream_(stream) {}

  std::uint64_t read(unsigned width);
  [[nodiscard]] std::size_t position() const noexcept { return pos_; }
  [[nodiscard]] std::size_t remaining() const noexcept { return stream_.size_bits() - pos_; }

 private:
  const BitStream& stream_;
  std::size_t pos_ = 0;
};

/// Smallest w with 2^w >= n (0 for n <= 1).
unsigned ceil_log2(std::uint64_t n) noexcept;

}  // namespace cgd
