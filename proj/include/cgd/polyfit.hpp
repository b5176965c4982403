#pragma once

#include <vector>

#include "cgd/signal.hpp"

namespace cgd {

/// Coefficients a_0..a_N (zero-padded to N+1) of sum_j a_j (k/n)^j on one
/// segment, and the squared error they achieve there.
struct SegmentFit {
  Vector coefficients;
  double error = 0.0;
};

struct Segmentation {
  /// Sorted split indices in (0, n); segment l covers [s_l, s_{l+1}) with s_0 = 0, s_{q+1} = n.
  std::vector<Eigen::Index> singularities;
  std::vector<SegmentFit> segments;
  double total_error = 0.0;
};

/// Constrained least squares on samples i1..i2 (inclusive):
///   min sum_k (x_k - sum_{j<=N} a_j (k/n)^j)^2  s.t.  a_j in [0, 1], sum_j a_j <= 1.
///
/// Segments with fewer than N+1 samples are fitted with degree (length - 1),
/// whose minimizer is unique; the full-degree problem is also solved and used
/// instead only if it is strictly better. Throws DomainError when i1 > i2.
SegmentFit segment_error(const Eigen::Ref<const Vector>& x, Eigen::Index i1, Eigen::Index i2, int max_degree);

/// Optimal piecewise-polynomial approximation with at most `max_singularities`
/// splits, by dynamic programming over the split-point trellis.
///
/// Totals within a small relative tolerance of the optimum count as ties; ties
/// prefer fewer singularities, then the lexicographically smallest tuple.
Segmentation viterbi_segmentation(const Eigen::Ref<const Vector>& x, int max_degree, int max_singularities);

/// Exhaustive search over all split placements; test oracle for viterbi_segmentation.
/// Throws SizeError for n above `max_length`.
Segmentation brute_force_segmentation(const Eigen::Ref<const Vector>& x, int max_degree, int max_singularities,
                                      Eigen::Index max_length = 16);

/// Samples of the piecewise polynomial described by `seg` at k/n, k = 0..n-1.
Vector evaluate_segmentation(const Segmentation& seg, Eigen::Index n);

/// sum_j a_j t^j by Horner's rule.
double evaluate_polynomial(const Eigen::Ref<const Vector>& coefficients, double t);

/// Euclidean projection onto {a : 0 <= a_j <= 1, sum_j a_j <= 1}.
Vector project_box_simplex(const Eigen::Ref<const Vector>& v);

/// Tie tolerance used by both segmentation searches.
double segmentation_tie_tolerance(const Eigen::Ref<const Vector>& x);

}  // namespace cgd
