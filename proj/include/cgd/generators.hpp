#pragma once

#include "cgd/polyfit.hpp"
#include "cgd/rng.hpp"

namespace cgd {

/// k-sparse signal: support uniform over k-subsets, values uniform on [-1, 1].
Vector random_sparse_signal(Eigen::Index n, Eigen::Index k, SeededRng& rng);

/// Member of the piecewise-polynomial class: `max_singularities` distinct
/// singularities uniform in {1, ..., n-1} (fewer if n is small) and per-segment
/// coefficients uniform on {a >= 0, sum a <= 1}.
Segmentation random_poly_segmentation(Eigen::Index n, int max_degree, int max_singularities, SeededRng& rng);

Vector random_poly_signal(Eigen::Index n, int max_degree, int max_singularities, SeededRng& rng);

/// Uniformly random k-subset of {0, ..., n-1}, ascending.
std::vector<Eigen::Index> random_subset(Eigen::Index n, Eigen::Index k, SeededRng& rng);

}  // namespace cgd
