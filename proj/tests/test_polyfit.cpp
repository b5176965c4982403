#include <doctest.h>

#include <cmath>

#include "cgd/generators.hpp"
#include "cgd/polyfit.hpp"

using namespace cgd;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

bool feasible(const Vector& a) {
  return (a.array() >= -1e-9).all() && (a.array() <= 1.0 + 1e-9).all() && a.sum() <= 1.0 + 1e-9;
}

/// Dense grid search over feasible (a0, a1); an independent upper bound on e(i1, i2) for N = 1.
double grid_min_linear(const Vector& x, Eigen::Index i1, Eigen::Index i2, int steps) {
  const double n = static_cast<double>(x.size());
  double best = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= steps; ++p) {
    for (int q = 0; p + q <= steps; ++q) {
      const double a0 = double(p) / steps, a1 = double(q) / steps;
      double e = 0;
      for (Eigen::Index k = i1; k <= i2; ++k) e += std::pow(x(k) - a0 - a1 * (k / n), 2);
      best = std::min(best, e);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("segment error examples") {
  const auto flat = segment_error(Vector::Constant(5, 0.5), 0, 4, 0);
  CHECK(flat.coefficients(0) == doctest::Approx(0.5));
  CHECK(flat.error <= 1e-24);

  const auto step = segment_error(vec({0, 0, 0, 1, 1, 1}), 0, 5, 0);
  CHECK(step.coefficients(0) == doctest::Approx(0.5));
  CHECK(step.error == doctest::Approx(1.5));

  // Two samples on the feasible line 0.2 + 0.5 t, n = 4.
  const Vector x = vec({0.2, 0.325, 0.45, 0.575});
  const auto line = segment_error(x, 1, 2, 1);
  CHECK(line.error <= 1e-20);
  CHECK(line.coefficients(0) == doctest::Approx(0.2));
  CHECK(line.coefficients(1) == doctest::Approx(0.5));

  CHECK_THROWS_AS(segment_error(x, 2, 1, 1), DomainError);
}

TEST_CASE("segment error respects constraints") {
  SeededRng rng(1);
  for (int N = 0; N <= 3; ++N) {
    for (int t = 0; t < 200; ++t) {
      const Vector x = 1.5 * rng.normal_vector(10);
      const auto i1 = static_cast<Eigen::Index>(rng.uniform_index(10));
      const auto i2 = i1 + static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(10 - i1)));
      const auto fit = segment_error(x, i1, i2, N);
      REQUIRE(fit.coefficients.size() == N + 1);
      CHECK(feasible(fit.coefficients));
      double e = 0;
      for (Eigen::Index k = i1; k <= i2; ++k) e += std::pow(x(k) - evaluate_polynomial(fit.coefficients, k / 10.0), 2);
      CHECK(fit.error == doctest::Approx(e).epsilon(1e-12).scale(1.0));
      const auto again = segment_error(x, i1, i2, N);
      CHECK(again.error == fit.error);
      CHECK(again.coefficients == fit.coefficients);
    }
  }
}

TEST_CASE("constrained fit matches a dense grid for lines") {
  SeededRng rng(2);
  for (int t = 0; t < 40; ++t) {
    const Vector x = rng.normal_vector(8);
    const auto fit = segment_error(x, 0, 7, 1);
    const double grid = grid_min_linear(x, 0, 7, 400);
    CHECK(fit.error <= grid + 1e-12);
    CHECK(fit.error >= grid - 0.02);
  }
}

TEST_CASE("constant fits clamp the mean") {
  SeededRng rng(3);
  for (int t = 0; t < 100; ++t) {
    const Vector x = 2.0 * rng.normal_vector(6);
    const auto fit = segment_error(x, 0, 5, 0);
    CHECK(fit.coefficients(0) == doctest::Approx(std::clamp(x.mean(), 0.0, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("box simplex projection") {
  CHECK(project_box_simplex(vec({0.2, 0.3})) == vec({0.2, 0.3}));
  CHECK(project_box_simplex(vec({-1.0, 2.0})) == vec({0.0, 1.0}));
  const Vector p = project_box_simplex(vec({0.9, 0.9}));
  CHECK(p(0) == doctest::Approx(0.5));
  CHECK(p(1) == doctest::Approx(0.5));
  SeededRng rng(4);
  for (int t = 0; t < 200; ++t) {
    const Vector v = 2.0 * rng.normal_vector(4);
    const Vector q = project_box_simplex(v);
    CHECK(feasible(q));
    // Optimality: no feasible random point is closer.
    for (int s = 0; s < 20; ++s) {
      Vector e(5);
      for (auto& c : e) c = -std::log1p(-rng.uniform());
      const Vector z = e.head(4) / e.sum();
      CHECK((v - q).norm() <= (v - z).norm() + 1e-9);
    }
  }
}

TEST_CASE("viterbi with no singularities is a single segment") {
  SeededRng rng(5);
  const Vector x = rng.normal_vector(9);
  const auto seg = viterbi_segmentation(x, 1, 0);
  CHECK(seg.singularities.empty());
  REQUIRE(seg.segments.size() == 1);
  CHECK(seg.total_error == doctest::Approx(segment_error(x, 0, 8, 1).error).epsilon(1e-14));
}

TEST_CASE("viterbi recovers class members exactly") {
  SeededRng rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto truth = random_poly_segmentation(20, 1, 2, rng);
    const Vector x = evaluate_segmentation(truth, 20);
    const auto seg = viterbi_segmentation(x, 1, 2);
    CHECK(seg.total_error <= 1e-18);
    CHECK((evaluate_segmentation(seg, 20) - x).norm() <= 1e-9);
  }
}

TEST_CASE("step example segmentation") {
  const Vector x = vec({0, 0, 0, 1, 1, 1});
  for (const auto& seg : {viterbi_segmentation(x, 0, 1), brute_force_segmentation(x, 0, 1)}) {
    REQUIRE(seg.singularities.size() == 1);
    CHECK(seg.singularities[0] == 3);
    CHECK(seg.total_error == doctest::Approx(0.0).scale(1e-15));
  }
}

TEST_CASE("singleton segments clamp each sample") {
  const Vector x = vec({-0.3, 0.4, 1.7, 0.9});
  const auto seg = brute_force_segmentation(x, 0, 3);
  double expected = 0;
  for (double v : x) expected += std::pow(v - std::clamp(v, 0.0, 1.0), 2);
  CHECK(seg.total_error == doctest::Approx(expected).epsilon(1e-12));
  CHECK(viterbi_segmentation(x, 0, 3).total_error == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("viterbi agrees with brute force") {
  SeededRng rng(7);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform_index(9));
    const int N = static_cast<int>(rng.uniform_index(2));
    const int Q = static_cast<int>(rng.uniform_index(3));
    const Vector x = rng.uniform() < 0.5 ? Vector(rng.normal_vector(n))
                                         : Vector(random_poly_signal(n, N, Q, rng) + 0.05 * rng.normal_vector(n));
    const auto dp = viterbi_segmentation(x, N, Q);
    const auto bf = brute_force_segmentation(x, N, Q);
    CHECK(std::abs(dp.total_error - bf.total_error) <= 1e-9);
    CHECK(dp.singularities == bf.singularities);
    double sum = 0;
    for (const auto& s : dp.segments) {
      CHECK(feasible(s.coefficients));
      sum += s.error;
    }
    CHECK(dp.total_error == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("total error is monotone in Q and N") {
  SeededRng rng(8);
  for (int t = 0; t < 30; ++t) {
    const Vector x = rng.normal_vector(12);
    double prev_q = std::numeric_limits<double>::infinity();
    for (int Q = 0; Q <= 3; ++Q) {
      const double e = viterbi_segmentation(x, 1, Q).total_error;
      CHECK(e <= prev_q + 1e-12);
      prev_q = e;
    }
    double prev_n = std::numeric_limits<double>::infinity();
    for (int N = 0; N <= 3; ++N) {
      const double e = viterbi_segmentation(x, N, 1).total_error;
      CHECK(e <= prev_n + 1e-9);
      prev_n = e;
    }
  }
}

TEST_CASE("brute force guard") {
  CHECK_THROWS_AS(brute_force_segmentation(Vector::Zero(17), 0, 1), SizeError);
  CHECK_NOTHROW(brute_force_segmentation(Vector::Zero(17), 0, 1, 20));
}

TEST_CASE("polynomial evaluation") {
  CHECK(evaluate_polynomial(vec({0.1, 0.2, 0.3}), 0.5) == doctest::Approx(0.1 + 0.1 + 0.075));
  Segmentation seg;
  seg.singularities = {2};
  seg.segments = {{vec({0.5}), 0.0}, {vec({0.0, 1.0}), 0.0}};
  CHECK(evaluate_segmentation(seg, 4) == vec({0.5, 0.5, 0.5, 0.75}));
}
