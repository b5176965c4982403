#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "cgd/signal.hpp"

namespace cgd {

/// SplitMix64 finalizer; used to derive statistically independent child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for a named sub-stream, e.g. derive_seed(master, "operator", trial).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index = 0) noexcept;

/// Reproducible random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. All derived distributions (uniform reals, normals, integers) are
/// implemented here rather than with <random> distributions, whose algorithms
/// are implementation-defined; this keeps streams identical across platforms.
class SeededRng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/u53/box-muller/splitmix64-derive";

  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] static constexpr std::string_view algorithm() noexcept { return kAlgorithm; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound);
  double normal();
  /// +1 or -1 with equal probability.
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

  Vector normal_vector(Eigen::Index n);
  /// Uniformly distributed point on the unit sphere S^{n-1}.
  Vector unit_vector(Eigen::Index n);

  /// Generator for a named child stream of this generator's seed.
  [[nodiscard]] SeededRng child(std::string_view tag, std::uint64_t index = 0) const {
    return SeededRng(derive_seed(seed_, tag, index));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cgd
