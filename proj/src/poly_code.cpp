#include "cgd/poly_code.hpp"

#include <algorithm>
#include <cmath>

#include "cgd/error.hpp"

namespace cgd {

PiecewisePolyParams PiecewisePolyParams::from_gamma(Eigen::Index n, int max_degree, int max_singularities,
                                                    double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("poly code: gamma must be >= 0");
  PiecewisePolyParams p;
  p.n = n;
  p.max_degree = max_degree;
  p.max_singularities = max_singularities;
  p.gamma = gamma;
  const double raw = (gamma + 0.5) * std::log2(static_cast<double>(n)) + std::log2(max_degree + 1.0);
  p.b = std::max(1, static_cast<int>(std::ceil(raw - 1e-9)));
  return p;
}

PolyRateReport poly_rate_report(const PiecewisePolyParams& p) {
  const PiecewisePolyCode code(p);
  const double logn = std::log2(static_cast<double>(p.n));
  const double pieces = (p.max_degree + 1.0) * (p.max_singularities + 1.0);
  PolyRateReport r;
  r.payload_bits = code.payload_bits();
  r.rate_bound = pieces * p.b + p.max_singularities * (logn + 1.0);
  if (p.gamma) {
    r.gamma_rate_bound = ((*p.gamma + 0.5) * pieces + p.max_singularities) * logn +
                         pieces * (std::log2(p.max_degree + 1.0) + 1.0) + 1.0;
  }
  return r;
}

std::vector<std::uint64_t> quantize_coefficients(const Eigen::Ref<const Vector>& a, int b) {
  const double levels = std::ldexp(1.0, b);
  const auto top = (std::uint64_t{1} << b) - 1;
  const auto full = std::uint64_t{1} << b;  // sum of levels must stay <= 2^b
  std::vector<std::uint64_t> q(static_cast<std::size_t>(a.size()));
  std::uint64_t sum = 0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double scaled = std::clamp(a(j), 0.0, 1.0) * levels;
    q[static_cast<std::size_t>(j)] = std::min(static_cast<std::uint64_t>(std::llround(scaled)), top);
    sum += q[static_cast<std::size_t>(j)];
  }
  while (sum > full) {
    std::size_t pick = q.size();
    double worst_excess = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double excess = static_cast<double>(q[j]) - std::clamp(a(static_cast<Eigen::Index>(j)), 0.0, 1.0) * levels;
      if (excess > worst_excess) {
        worst_excess = excess;
        pick = j;
      }
    }
    if (pick == q.size()) throw DomainError("quantize_coefficients: coefficients violate sum <= 1");
    --q[pick];
    --sum;
  }
  return q;
}

PiecewisePolyCode::PiecewisePolyCode(PiecewisePolyParams params)
    : p_(params), split_bits_(ceil_log2(static_cast<std::uint64_t>(params.n)) + 1) {
  if (p_.n < 1) throw DomainError("poly code: n must be >= 1");
  if (p_.max_degree < 0 || p_.max_degree > 5) throw DomainError("poly code: need 0 <= N <= 5");
  if (p_.max_singularities < 0) throw DomainError("poly code: Q must be >= 0");
  if (p_.b < 1 || p_.b > 52) throw DomainError("poly code: need 1 <= b <= 52");
}

std::uint64_t PiecewisePolyCode::payload_bits() const {
  const auto q = static_cast<std::uint64_t>(p_.max_singularities);
  const auto coeffs = static_cast<std::uint64_t>(p_.max_degree + 1) * (q + 1);
  return q * split_bits_ + coeffs * static_cast<std::uint64_t>(p_.b);
}

double PiecewisePolyCode::distortion_bound() const {
  return std::sqrt(static_cast<double>(p_.n)) * (p_.max_degree + 1) * std::ldexp(1.0, -p_.b);
}

BitStream PiecewisePolyCode::encode_once(const Eigen::Ref<const Vector>& x) const {
  const Segmentation seg = viterbi_segmentation(x, p_.max_degree, p_.max_singularities);

  BitStream s = start_stream();
  for (int slot = 0; slot < p_.max_singularities; ++slot) {
    const auto value = static_cast<std::size_t>(slot) < seg.singularities.size()
                           ? seg.singularities[static_cast<std::size_t>(slot)]
                           : p_.n;
    s.push(static_cast<std::uint64_t>(value), split_bits_);
  }
  for (int l = 0; l <= p_.max_singularities; ++l) {
    if (static_cast<std::size_t>(l) < seg.segments.size()) {
      for (auto level : quantize_coefficients(seg.segments[static_cast<std::size_t>(l)].coefficients, p_.b)) {
        s.push(level, static_cast<unsigned>(p_.b));
      }
    } else {
      for (int j = 0; j <= p_.max_degree; ++j) s.push(0, static_cast<unsigned>(p_.b));
    }
  }
  return s;
}

BitStream PiecewisePolyCode::encode(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != p_.n) throw DimensionError("poly encode: length mismatch");
  // Quantization can make adjacent pieces coincide, so the segmentation of the
  // decoded signal may differ from the one chosen for x. Re-encoding the
  // decoded codeword until the stream repeats makes encode(decode(s)) == s.
  BitStream s = encode_once(x);
  for (int round = 0; round < kCanonicalRounds; ++round) {
    BitStream next = encode_once(decode(s));
    if (next == s) break;
    s = std::move(next);
  }
  return s;
}

Segmentation PiecewisePolyCode::read_segmentation(const BitStream& bits) const {
  BitReader reader(bits);
  check_stream(bits, reader);
  Segmentation seg;
  bool unused = false;
  Eigen::Index previous = 0;
  for (int slot = 0; slot < p_.max_singularities; ++slot) {
    const auto value = static_cast<Eigen::Index>(reader.read(split_bits_));
    if (value == p_.n) {
      unused = true;
      continue;
    }
    if (unused) throw DecodeError("poly decode: singularity after an unused slot");
    if (value <= previous || value >= p_.n) throw DecodeError("poly decode: singularities must increase within (0, n)");
    seg.singularities.push_back(value);
    previous = value;
  }
  const double levels = std::ldexp(1.0, p_.b);
  for (int l = 0; l <= p_.max_singularities; ++l) {
    Vector a(p_.max_degree + 1);
    std::uint64_t sum = 0;
    for (int j = 0; j <= p_.max_degree; ++j) {
      const auto level = reader.read(static_cast<unsigned>(p_.b));
      sum += level;
      a(j) = static_cast<double>(level) / levels;
    }
    const bool used = static_cast<std::size_t>(l) <= seg.singularities.size();
    if (!used && sum != 0) throw DecodeError("poly decode: unused segment carries coefficients");
    if (sum > (std::uint64_t{1} << p_.b)) throw DecodeError("poly decode: coefficient levels sum above 1");
    if (used) seg.segments.push_back(SegmentFit{std::move(a), 0.0});
  }
  return seg;
}

Vector PiecewisePolyCode::decode(const BitStream& bits) const {
  return evaluate_segmentation(read_segmentation(bits), p_.n);
}

}  // namespace cgd
