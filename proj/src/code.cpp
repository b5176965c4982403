#include "cgd/code.hpp"

#include <algorithm>
#include <set>

#include "cgd/error.hpp"

namespace cgd {

Vector CompressionCode::project(const Eigen::Ref<const Vector>& x) const { return decode(encode(x)); }

BitStream FixedLayoutCode::start_stream() const {
  BitStream s;
  s.push(header_word(), kHeaderBits);
  return s;
}

void FixedLayoutCode::check_stream(const BitStream& bits, BitReader& reader) const {
  if (bits.size_bits() != kHeaderBits + payload_bits()) {
    throw DecodeError(name() + ": stream has " + std::to_string(bits.size_bits()) + " bits, expected " +
                      std::to_string(kHeaderBits + payload_bits()));
  }
  if (reader.read(kHeaderBits) != header_word()) throw DecodeError(name() + ": header tag/version mismatch");
}

Vector code_project(const CompressionCode& code, const Eigen::Ref<const Vector>& x) {
  if (x.size() != code.length()) {
    throw DimensionError("code_project: signal length " + std::to_string(x.size()) + " but code expects " +
                         std::to_string(code.length()));
  }
  return code.project(x);
}

std::vector<Vector> enumerate_codebook(const FixedLayoutCode& code, std::size_t guard) {
  const std::uint64_t payload = code.payload_bits();
  if (payload >= 63 || (std::uint64_t{1} << payload) > guard) {
    throw SizeError("enumerate_codebook: 2^" + std::to_string(payload) + " streams exceed the guard of " +
                    std::to_string(guard));
  }
  const auto lex_less = [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  };
  std::set<Vector, decltype(lex_less)> seen(lex_less);
  std::vector<Vector> codewords;
  for (std::uint64_t word = 0; word < (std::uint64_t{1} << payload); ++word) {
    BitStream s;
    s.push(code.header_word(), FixedLayoutCode::kHeaderBits);
    s.push(word, static_cast<unsigned>(payload));
    Vector v;
    try {
      v = code.decode(s);
    } catch (const DecodeError&) {
      continue;
    }
    if (seen.insert(v).second) codewords.push_back(std::move(v));
  }
  return codewords;
}

}  // namespace cgd
