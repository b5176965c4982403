#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "cgd/error.hpp"

namespace cgd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// True when every coefficient of the expression is finite.
template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.array().isFinite().all();
}

template <typename A, typename B>
void require_same_length(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                         const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
}

/// A finite real vector of fixed length: the object being sensed and reconstructed.
///
/// Construction validates finiteness; afterwards the length can never change
/// (there is no resize and no mutable access to the storage).
class Signal {
 public:
  explicit Signal(Vector values) : values_(std::move(values)) {
    if (values_.size() < 1) throw DimensionError("Signal: length must be positive");
    if (!all_finite(values_)) throw DomainError("Signal: non-finite entry");
  }

  [[nodiscard]] const Vector& values() const noexcept { return values_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](Eigen::Index i) const { return values_(i); }

  friend bool operator==(const Signal& a, const Signal& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  Vector values_;
};

}  // namespace cgd
