#include "cgd/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cgd/error.hpp"

namespace cgd {

std::vector<Eigen::Index> random_subset(Eigen::Index n, Eigen::Index k, SeededRng& rng) {
  if (k < 0 || k > n) throw DomainError("random_subset: need 0 <= k <= n");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Vector random_sparse_signal(Eigen::Index n, Eigen::Index k, SeededRng& rng) {
  Vector x = Vector::Zero(n);
  for (const Eigen::Index i : random_subset(n, k, rng)) x(i) = rng.uniform(-1.0, 1.0);
  return x;
}

Segmentation random_poly_segmentation(Eigen::Index n, int max_degree, int max_singularities, SeededRng& rng) {
  if (n < 1 || max_degree < 0 || max_singularities < 0) throw DomainError("random_poly_segmentation: bad parameters");
  const Eigen::Index q = std::min<Eigen::Index>(max_singularities, n - 1);
  Segmentation seg;
  for (const Eigen::Index s : random_subset(n - 1, q, rng)) seg.singularities.push_back(s + 1);
  for (Eigen::Index l = 0; l <= q; ++l) {
    // Flat Dirichlet over N+2 parts: the first N+1 are the coefficients, the last is slack.
    Vector e(max_degree + 2);
    for (Eigen::Index j = 0; j < e.size(); ++j) e(j) = -std::log1p(-rng.uniform());
    SegmentFit fit;
    fit.coefficients = e.head(max_degree + 1) / e.sum();
    seg.segments.push_back(std::move(fit));
  }
  return seg;
}

Vector random_poly_signal(Eigen::Index n, int max_degree, int max_singularities, SeededRng& rng) {
  return evaluate_segmentation(random_poly_segmentation(n, max_degree, max_singularities, rng), n);
}

}  // namespace cgd
