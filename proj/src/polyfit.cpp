#include "cgd/polyfit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cgd/error.hpp"

namespace cgd {

namespace {

constexpr double kFeasTol = 1e-12;
constexpr int kMaxEnumeratedDim = 4;  // 3^4 * 2 faces
constexpr int kPgdMaxIters = 10000;
constexpr double kPgdTol = 1e-9;

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;

bool feasible(const SmallVector& a) {
  return (a.array() >= -kFeasTol).all() && (a.array() <= 1.0 + kFeasTol).all() && a.sum() <= 1.0 + kFeasTol;
}

SmallVector clean(SmallVector a) {
  a = a.cwiseMax(0.0).cwiseMin(1.0);
  return a;
}

/// Normal-equation data of a segment for degree d.
struct Moments {
  SmallMatrix gram;
  SmallVector rhs;
};

void add_sample(Moments& m, double xk, double t) {
  const int d = static_cast<int>(m.rhs.size()) - 1;
  std::array<double, 16> pw{};
  pw[0] = 1.0;
  for (int j = 1; j <= 2 * d; ++j) pw[static_cast<std::size_t>(j)] = pw[static_cast<std::size_t>(j - 1)] * t;
  for (int j = 0; j <= d; ++j) {
    m.rhs(j) += xk * pw[static_cast<std::size_t>(j)];
    for (int l = 0; l <= d; ++l) m.gram(j, l) += pw[static_cast<std::size_t>(j + l)];
  }
}

Moments zero_moments(int d) { return {SmallMatrix::Zero(d + 1, d + 1), SmallVector::Zero(d + 1)}; }

Moments moments(const Eigen::Ref<const Vector>& x, Eigen::Index i1, Eigen::Index i2, int d) {
  const double n = static_cast<double>(x.size());
  Moments m = zero_moments(d);
  for (Eigen::Index k = i1; k <= i2; ++k) add_sample(m, x(k), static_cast<double>(k) / n);
  return m;
}

/// Moments of a lower degree are the leading block of the higher-degree ones.
Moments leading(const Moments& m, int d) {
  return {m.gram.topLeftCorner(d + 1, d + 1), m.rhs.head(d + 1)};
}

double quadratic_objective(const Moments& m, const SmallVector& a) {
  return a.dot(m.gram * a) - 2.0 * a.dot(m.rhs);
}

/// Gaussian elimination with partial pivoting on a system of size <= kMaxKkt.
/// Returns false when a pivot is negligible relative to the largest entry.
constexpr int kMaxKkt = 5;
bool solve_small(std::array<std::array<double, kMaxKkt + 1>, kMaxKkt>& k, int sz,
                 std::array<double, kMaxKkt>& out) {
  double scale = 0.0;
  for (int i = 0; i < sz; ++i) {
    for (int j = 0; j < sz; ++j) scale = std::max(scale, std::abs(k[i][j]));
  }
  if (scale == 0.0) return false;
  for (int c = 0; c < sz; ++c) {
    int piv = c;
    for (int i = c + 1; i < sz; ++i) {
      if (std::abs(k[i][c]) > std::abs(k[piv][c])) piv = i;
    }
    if (std::abs(k[piv][c]) <= 1e-13 * scale) return false;
    std::swap(k[c], k[piv]);
    for (int i = c + 1; i < sz; ++i) {
      const double f = k[i][c] / k[c][c];
      for (int j = c; j <= sz; ++j) k[i][j] -= f * k[c][j];
    }
  }
  for (int i = sz - 1; i >= 0; --i) {
    double v = k[i][sz];
    for (int j = i + 1; j < sz; ++j) v -= k[i][j] * out[j];
    out[i] = v / k[i][i];
  }
  return true;
}

/// Exact minimizer over the box-simplex by enumerating the faces of the
/// feasible polytope (each a_j free / at 0 / at 1, sum constraint on or off)
/// and solving the equality-constrained problem on each.
SmallVector solve_by_faces(const Moments& m) {
  const int dim = static_cast<int>(m.rhs.size());
  int faces = 1;
  for (int j = 0; j < dim; ++j) faces *= 3;

  SmallVector best;
  double best_obj = std::numeric_limits<double>::infinity();
  SmallVector a(dim);
  for (int code = 0; code < faces; ++code) {
    for (int sum_active = 0; sum_active < 2; ++sum_active) {
      a.setZero();
      std::array<int, kMaxKkt> free_idx{};
      int nfree = 0;
      int c = code;
      for (int j = 0; j < dim; ++j, c /= 3) {
        const int state = c % 3;
        if (state == 0) free_idx[static_cast<std::size_t>(nfree++)] = j;
        else a(j) = state == 1 ? 0.0 : 1.0;
      }
      if (nfree > 0) {
        const int sz = nfree + sum_active;
        std::array<std::array<double, kMaxKkt + 1>, kMaxKkt> kkt{};
        for (int p = 0; p < nfree; ++p) {
          const int jp = free_idx[static_cast<std::size_t>(p)];
          double r = m.rhs(jp);
          for (int j = 0; j < dim; ++j) r -= m.gram(jp, j) * a(j);
          kkt[p][sz] = r;
          for (int q = 0; q < nfree; ++q) kkt[p][q] = m.gram(jp, free_idx[static_cast<std::size_t>(q)]);
          if (sum_active) {
            kkt[p][nfree] = 1.0;
            kkt[nfree][p] = 1.0;
          }
        }
        if (sum_active) kkt[nfree][sz] = 1.0 - a.sum();
        std::array<double, kMaxKkt> sol{};
        if (!solve_small(kkt, sz, sol)) continue;
        for (int p = 0; p < nfree; ++p) a(free_idx[static_cast<std::size_t>(p)]) = sol[static_cast<std::size_t>(p)];
      } else if (sum_active && std::abs(a.sum() - 1.0) > kFeasTol) {
        continue;
      }
      if (!feasible(a)) continue;
      const SmallVector cand = clean(a);
      const double obj = quadratic_objective(m, cand);
      if (obj < best_obj) {
        best_obj = obj;
        best = cand;
      }
    }
  }
  return best;
}

/// Projected gradient descent on the box-simplex, for dimensions too large to enumerate.
SmallVector solve_by_pgd(const Moments& m, SmallVector start) {
  Eigen::SelfAdjointEigenSolver<SmallMatrix> eig(m.gram, Eigen::EigenvaluesOnly);
  const double lipschitz = std::max(eig.eigenvalues().maxCoeff(), 1e-300);
  SmallVector a = project_box_simplex(start);
  for (int it = 0; it < kPgdMaxIters; ++it) {
    const SmallVector grad = m.gram * a - m.rhs;
    const SmallVector next = project_box_simplex(a - grad / lipschitz);
    const double step = (next - a).cwiseAbs().maxCoeff();
    a = next;
    if (step < kPgdTol) break;
  }
  return a;
}

SmallVector solve_constrained(const Moments& m) {
  const int dim = static_cast<int>(m.rhs.size());
  Eigen::LDLT<SmallMatrix> ldlt(m.gram);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    const SmallVector a = ldlt.solve(m.rhs);
    if (a.allFinite() && feasible(a) && (m.gram * a - m.rhs).norm() <= 1e-10 * (1.0 + m.rhs.norm())) {
      return clean(a);
    }
  }
  if (dim <= kMaxEnumeratedDim) return solve_by_faces(m);
  return solve_by_pgd(m, SmallVector::Zero(dim));
}

double direct_error(const Eigen::Ref<const Vector>& x, Eigen::Index i1, Eigen::Index i2, const Vector& a) {
  const double n = static_cast<double>(x.size());
  double e = 0.0;
  for (Eigen::Index k = i1; k <= i2; ++k) {
    const double r = x(k) - evaluate_polynomial(a, static_cast<double>(k) / n);
    e += r * r;
  }
  return e;
}

SegmentFit fit_degree(const Eigen::Ref<const Vector>& x, Eigen::Index i1, Eigen::Index i2, const Moments& m,
                      int max_degree) {
  const SmallVector a = solve_constrained(m);
  SegmentFit fit;
  fit.coefficients = Vector::Zero(max_degree + 1);
  fit.coefficients.head(a.size()) = a;
  fit.error = direct_error(x, i1, i2, fit.coefficients);
  return fit;
}

/// Fit of samples i1..i2 given their moments at degree max_degree.
SegmentFit fit_segment(const Eigen::Ref<const Vector>& x, Eigen::Index i1, Eigen::Index i2, const Moments& full,
                       int max_degree) {
  const Eigen::Index length = i2 - i1 + 1;
  const int degree = static_cast<int>(std::min<Eigen::Index>(max_degree, length - 1));
  if (degree == max_degree) return fit_degree(x, i1, i2, full, max_degree);
  SegmentFit fit = fit_degree(x, i1, i2, leading(full, degree), max_degree);
  // A single sample is fitted exactly by a_0 = clamp(x, 0, 1) whatever the degree;
  // for 2..N samples higher-degree terms can reach values the lower degree cannot.
  if (length >= 2) {
    SegmentFit wide = fit_degree(x, i1, i2, full, max_degree);
    if (wide.error < fit.error - 1e-12 * (1.0 + fit.error)) fit = std::move(wide);
  }
  return fit;
}

}  // namespace

double evaluate_polynomial(const Eigen::Ref<const Vector>& coefficients, double t) {
  double v = 0.0;
  for (Eigen::Index j = coefficients.size(); j-- > 0;) v = v * t + coefficients(j);
  return v;
}

Vector project_box_simplex(const Eigen::Ref<const Vector>& v) {
  Vector a = v.cwiseMax(0.0).cwiseMin(1.0);
  if (a.sum() <= 1.0) return a;
  // Active sum constraint: a = clamp(v - theta, 0, 1) with sum = 1; bisect on theta.
  double lo = 0.0;
  double hi = v.maxCoeff();
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((v.array() - mid).cwiseMax(0.0).cwiseMin(1.0).sum() > 1.0) lo = mid;
    else hi = mid;
  }
  return (v.array() - hi).cwiseMax(0.0).cwiseMin(1.0).matrix();
}

SegmentFit segment_error(const Eigen::Ref<const Vector>& x, Eigen::Index i1, Eigen::Index i2, int max_degree) {
  if (max_degree < 0) throw DomainError("segment_error: degree must be >= 0");
  if (i1 > i2) throw DomainError("segment_error: empty segment (i1 > i2)");
  if (i1 < 0 || i2 >= x.size()) throw DimensionError("segment_error: segment outside the signal");

  return fit_segment(x, i1, i2, moments(x, i1, i2, max_degree), max_degree);
}

double segmentation_tie_tolerance(const Eigen::Ref<const Vector>& x) {
  return 1e-12 * (1.0 + x.squaredNorm());
}

Vector evaluate_segmentation(const Segmentation& seg, Eigen::Index n) {
  Vector out(n);
  const double nn = static_cast<double>(n);
  Eigen::Index start = 0;
  for (std::size_t l = 0; l < seg.segments.size(); ++l) {
    const Eigen::Index end = l < seg.singularities.size() ? seg.singularities[l] : n;
    for (Eigen::Index k = start; k < end; ++k) {
      out(k) = evaluate_polynomial(seg.segments[l].coefficients, static_cast<double>(k) / nn);
    }
    start = end;
  }
  return out;
}

namespace {

/// Lazily filled upper-triangular table of e(i1, i2). Segment moments come
/// from prefix sums, so each entry costs O(N^2) plus the fit itself.
class SegmentTable {
 public:
  SegmentTable(const Eigen::Ref<const Vector>& x, int degree)
      : x_(x), degree_(degree), n_(x.size()), fits_(static_cast<std::size_t>(n_ * n_)),
        pow_sums_(Matrix::Zero(2 * degree + 1, n_ + 1)), data_sums_(Matrix::Zero(degree + 1, n_ + 1)) {
    const double n = static_cast<double>(n_);
    for (Eigen::Index k = 0; k < n_; ++k) {
      const double t = static_cast<double>(k) / n;
      double p = 1.0;
      for (int j = 0; j <= 2 * degree; ++j, p *= t) {
        pow_sums_(j, k + 1) = pow_sums_(j, k) + p;
        if (j <= degree) data_sums_(j, k + 1) = data_sums_(j, k) + x(k) * p;
      }
    }
  }

  const SegmentFit& fit(Eigen::Index i1, Eigen::Index i2) {
    auto& slot = fits_[static_cast<std::size_t>(i1 * n_ + i2)];
    if (slot.coefficients.size() == 0) {
      Moments m = zero_moments(degree_);
      for (int j = 0; j <= degree_; ++j) {
        m.rhs(j) = data_sums_(j, i2 + 1) - data_sums_(j, i1);
        for (int l = 0; l <= degree_; ++l) m.gram(j, l) = pow_sums_(j + l, i2 + 1) - pow_sums_(j + l, i1);
      }
      slot = fit_segment(x_, i1, i2, m, degree_);
    }
    return slot;
  }
  double error(Eigen::Index i1, Eigen::Index i2) { return fit(i1, i2).error; }

 private:
  const Eigen::Ref<const Vector>& x_;
  int degree_;
  Eigen::Index n_;
  std::vector<SegmentFit> fits_;
  Matrix pow_sums_;   // row j: prefix sums of t^j
  Matrix data_sums_;  // row j: prefix sums of x t^j
};

Segmentation assemble(SegmentTable& table, std::vector<Eigen::Index> singularities, Eigen::Index n) {
  Segmentation seg;
  seg.singularities = std::move(singularities);
  Eigen::Index start = 0;
  for (std::size_t l = 0; l <= seg.singularities.size(); ++l) {
    const Eigen::Index end = l < seg.singularities.size() ? seg.singularities[l] : n;
    seg.segments.push_back(table.fit(start, end - 1));
    seg.total_error += seg.segments.back().error;
    start = end;
  }
  return seg;
}

void validate(const Eigen::Ref<const Vector>& x, int max_degree, int max_singularities) {
  if (x.size() < 1) throw DimensionError("segmentation: empty signal");
  if (max_degree < 0 || max_singularities < 0) throw DomainError("segmentation: N and Q must be >= 0");
  if (!all_finite(x)) throw DomainError("segmentation: non-finite entry");
}

}  // namespace

Segmentation viterbi_segmentation(const Eigen::Ref<const Vector>& x, int max_degree, int max_singularities) {
  validate(x, max_degree, max_singularities);
  const Eigen::Index n = x.size();
  const double tol = segmentation_tie_tolerance(x);
  const auto max_segments = static_cast<Eigen::Index>(std::min<Eigen::Index>(max_singularities + 1, n));
  SegmentTable table(x, max_degree);

  // cost[q][s]: least error covering [s, n) with exactly q segments; next[q][s]: start of the second one.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const auto width = static_cast<std::size_t>(n + 1);
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(max_segments + 1), std::vector<double>(width, kInf));
  std::vector<std::vector<Eigen::Index>> next(static_cast<std::size_t>(max_segments + 1),
                                              std::vector<Eigen::Index>(width, -1));
  for (Eigen::Index s = 0; s < n; ++s) cost[1][static_cast<std::size_t>(s)] = table.error(s, n - 1);

  for (Eigen::Index q = 2; q <= max_segments; ++q) {
    auto& cq = cost[static_cast<std::size_t>(q)];
    const auto& prev = cost[static_cast<std::size_t>(q - 1)];
    // The last layer is only read at s = 0.
    const Eigen::Index last_start = q == max_segments ? 0 : n - q;
    for (Eigen::Index s = 0; s <= last_start; ++s) {
      double best = kInf;
      for (Eigen::Index t = s + 1; t + q - 1 <= n; ++t) {
        best = std::min(best, table.error(s, t - 1) + prev[static_cast<std::size_t>(t)]);
      }
      // Smallest next split among near-optimal choices gives the lexicographically smallest tuple.
      for (Eigen::Index t = s + 1; t + q - 1 <= n; ++t) {
        if (table.error(s, t - 1) + prev[static_cast<std::size_t>(t)] <= best + tol) {
          next[static_cast<std::size_t>(q)][static_cast<std::size_t>(s)] = t;
          break;
        }
      }
      cq[static_cast<std::size_t>(s)] = best;
    }
  }

  double best_total = kInf;
  for (Eigen::Index q = 1; q <= max_segments; ++q) best_total = std::min(best_total, cost[static_cast<std::size_t>(q)][0]);
  Eigen::Index segments = 1;
  while (cost[static_cast<std::size_t>(segments)][0] > best_total + tol) ++segments;

  std::vector<Eigen::Index> singularities;
  Eigen::Index s = 0;
  for (Eigen::Index q = segments; q >= 2; --q) {
    s = next[static_cast<std::size_t>(q)][static_cast<std::size_t>(s)];
    singularities.push_back(s);
  }
  return assemble(table, std::move(singularities), n);
}

Segmentation brute_force_segmentation(const Eigen::Ref<const Vector>& x, int max_degree, int max_singularities,
                                      Eigen::Index max_length) {
  validate(x, max_degree, max_singularities);
  const Eigen::Index n = x.size();
  if (n > max_length) {
    throw SizeError("brute_force_segmentation: n = " + std::to_string(n) + " exceeds the guard " +
                    std::to_string(max_length));
  }
  const double tol = segmentation_tie_tolerance(x);

  // All tuples in (count, lexicographic) order.
  std::vector<std::vector<Eigen::Index>> tuples;
  const Eigen::Index max_count = std::min<Eigen::Index>(max_singularities, n - 1);
  for (Eigen::Index q = 0; q <= max_count; ++q) {
    std::vector<Eigen::Index> c(static_cast<std::size_t>(q));
    for (Eigen::Index i = 0; i < q; ++i) c[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
      tuples.push_back(c);
      Eigen::Index i = q - 1;
      while (i >= 0 && c[static_cast<std::size_t>(i)] == n - q + i) --i;
      if (i < 0) break;
      ++c[static_cast<std::size_t>(i)];
      for (Eigen::Index j = i + 1; j < q; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  std::vector<double> totals;
  totals.reserve(tuples.size());
  for (const auto& tuple : tuples) {
    double total = 0.0;
    Eigen::Index start = 0;
    for (std::size_t l = 0; l <= tuple.size(); ++l) {
      const Eigen::Index end = l < tuple.size() ? tuple[l] : n;
      total += segment_error(x, start, end - 1, max_degree).error;
      start = end;
    }
    totals.push_back(total);
  }
  const double best = *std::min_element(totals.begin(), totals.end());
  std::size_t pick = 0;
  while (totals[pick] > best + tol) ++pick;

  SegmentTable table(x, max_degree);
  return assemble(table, tuples[pick], n);
}

}  // namespace cgd
