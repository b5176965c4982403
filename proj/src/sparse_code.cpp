#include "cgd/sparse_code.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cgd/error.hpp"

namespace cgd {

namespace {

// ceil() that ignores sub-1e-9 excess from floating products such as 0.6 * 5.
int ceil_tolerant(double v) { return static_cast<int>(std::ceil(v - 1e-9)); }

struct Entry {
  Eigen::Index index;
  bool negative;
  std::uint64_t bin;
  [[nodiscard]] bool is_zero() const { return negative && bin == 0; }
};

}  // namespace

SparseQuantParams SparseQuantParams::from_gamma(Eigen::Index n, Eigen::Index k, double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("sparse code: gamma must be >= 0");
  if (n < 1 || k < 1) throw DomainError("sparse code: need n, k >= 1");
  SparseQuantParams p;
  p.n = n;
  p.k = k;
  p.gamma = gamma;
  p.b = std::max(1, ceil_tolerant(gamma * std::log2(static_cast<double>(n)) + 0.5 * std::log2(static_cast<double>(k))));
  return p;
}

SparseRateReport sparse_rate_report(const SparseQuantParams& p) {
  const SparseQuantCode code(p);
  const double n = static_cast<double>(p.n);
  const double k = static_cast<double>(p.k);
  SparseRateReport r;
  r.payload_bits = code.payload_bits();
  if (p.gamma) r.rate_bound = (1.0 + *p.gamma) * k * std::log2(n) + 0.5 * k * std::log2(k) + 2.0 * k;
  r.chained_rate_bound = (k + 1.0) * std::log2(n) + k * (p.b + 1);
  return r;
}

SparseQuantCode::SparseQuantCode(SparseQuantParams params) : p_(params), index_bits_(ceil_log2(static_cast<std::uint64_t>(params.n))) {
  if (p_.n < 1) throw DomainError("sparse code: n must be >= 1");
  if (p_.k < 1 || p_.k > p_.n) throw DomainError("sparse code: need 1 <= k <= n");
  if (p_.b < 1 || p_.b > 52) throw DomainError("sparse code: need 1 <= b <= 52");
}

std::uint64_t SparseQuantCode::payload_bits() const {
  return static_cast<std::uint64_t>(p_.k) * (index_bits_ + static_cast<std::uint64_t>(p_.b) + 1);
}

double SparseQuantCode::distortion_bound() const {
  return std::ldexp(1.0, -p_.b) * std::sqrt(static_cast<double>(p_.k));
}

BitStream SparseQuantCode::encode(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != p_.n) throw DimensionError("sparse encode: length mismatch");
  if (!all_finite(x)) throw DomainError("sparse encode: non-finite entry");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(p_.n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::partial_sort(order.begin(), order.begin() + p_.k, order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(x(a));
    const double mb = std::abs(x(b));
    return ma != mb ? ma > mb : a < b;
  });

  const double levels = std::ldexp(1.0, p_.b);
  const std::uint64_t top_bin = (std::uint64_t{1} << p_.b) - 1;
  std::vector<Entry> entries;
  std::vector<bool> taken(static_cast<std::size_t>(p_.n), false);
  std::size_t zeros = 0;
  for (Eigen::Index s = 0; s < p_.k; ++s) {
    const Eigen::Index i = order[static_cast<std::size_t>(s)];
    const double u = std::clamp(x(i), -1.0, 1.0);
    const auto bin = std::min(static_cast<std::uint64_t>(std::floor(std::abs(u) * levels)), top_bin);
    const Entry e{i, u <= 0.0, bin};
    if (u == 0.0 || e.is_zero()) {
      ++zeros;
    } else {
      entries.push_back(e);
      taken[static_cast<std::size_t>(i)] = true;
    }
  }
  for (Eigen::Index i = 0; zeros > 0; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) {
      entries.push_back(Entry{i, true, 0});
      --zeros;
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });

  BitStream s = start_stream();
  for (const Entry& e : entries) {
    s.push(static_cast<std::uint64_t>(e.index), index_bits_);
    s.push_bit(e.negative);
    s.push(e.bin, static_cast<unsigned>(p_.b));
  }
  return s;
}

Vector SparseQuantCode::decode(const BitStream& bits) const {
  BitReader reader(bits);
  check_stream(bits, reader);
  Vector x = Vector::Zero(p_.n);
  const double levels = std::ldexp(1.0, p_.b);
  Eigen::Index previous = -1;
  for (Eigen::Index s = 0; s < p_.k; ++s) {
    const auto index = static_cast<Eigen::Index>(reader.read(index_bits_));
    const bool negative = reader.read(1) != 0;
    const auto bin = reader.read(static_cast<unsigned>(p_.b));
    if (index >= p_.n) throw DecodeError("sparse decode: index " + std::to_string(index) + " out of range");
    if (index <= previous) throw DecodeError("sparse decode: indices must be strictly increasing");
    previous = index;
    if (negative && bin == 0) continue;
    const double magnitude = (static_cast<double>(bin) + 0.5) / levels;
    x(index) = negative ? -magnitude : magnitude;
  }
  return x;
}

}  // namespace cgd
