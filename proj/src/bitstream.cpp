#include "cgd/bitstream.hpp"

#include "cgd/error.hpp"

namespace cgd {

BitStream::BitStream(std::vector<std::uint8_t> bytes, std::size_t bit_count)
    : bytes_(std::move(bytes)), bit_count_(bit_count) {
  if ((bit_count_ + 7) / 8 != bytes_.size()) throw DecodeError("BitStream: byte count does not match bit count");
}

void BitStream::push_bit(bool b) {
  if ((bit_count_ & 7) == 0) bytes_.push_back(0);
  if (b) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (bit_count_ & 7));
  ++bit_count_;
}

void BitStream::push(std::uint64_t value, unsigned width) {
  for (unsigned i = width; i-- > 0;) push_bit((value >> i) & 1U);
}

std::uint64_t BitReader::read(unsigned width) {
  if (width > remaining()) throw DecodeError("bit stream truncated");
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i) v = (v << 1) | (stream_.bit(pos_++) ? 1U : 0U);
  return v;
}

unsigned ceil_log2(std::uint64_t n) noexcept {
  unsigned w = 0;
  while (w < 64 && (std::uint64_t{1} << w) < n) ++w;
  return w;
}

}  // namespace cgd
