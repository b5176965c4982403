#include <doctest.h>

#include <Eigen/SVD>
#include <algorithm>
#include <numbers>
#include <set>

#include "cgd/dct.hpp"
#include "cgd/metrics.hpp"
#include "cgd/operator.hpp"
#include "cgd/rng.hpp"

using namespace cgd;

namespace {

const OperatorKind kAllKinds[] = {OperatorKind::kGaussianUnit, OperatorKind::kGaussianOverN, OperatorKind::kRademacher,
                                  OperatorKind::kPartialDct};

}  // namespace

TEST_CASE("dct matrix is orthonormal DCT-II") {
  for (Eigen::Index n : {1, 2, 5, 8, 13}) {
    const Matrix c = dct_matrix(n);
    CHECK((c * c.transpose() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-13);
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        CHECK(c(k, i) == doctest::Approx(s * std::cos(std::numbers::pi * (i + 0.5) * k / n)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("fast dct agrees with direct evaluation") {
  SeededRng rng(3);
  for (Eigen::Index n : {1, 2, 3, 7, 16, 31, 33, 64, 100, 255, 256}) {
    const Vector x = rng.normal_vector(n);
    const Vector direct = dct2_direct(x);
    CHECK((dct2_fft(x) - direct).norm() <= 1e-11 * (1.0 + direct.norm()));
    CHECK((idct2_fft(direct) - x).norm() <= 1e-11 * (1.0 + x.norm()));
    CHECK((idct2_direct(direct) - x).norm() <= 1e-11 * (1.0 + x.norm()));
    CHECK((dct2(x) - direct).norm() <= 1e-11 * (1.0 + direct.norm()));
    CHECK((idct2(dct2(x)) - x).norm() <= 1e-11 * (1.0 + x.norm()));
  }
}

TEST_CASE("operator sampling is deterministic") {
  for (auto kind : kAllKinds) {
    const auto a = LinearOperator::sample(kind, 12, 30, 1.5, 77);
    const auto b = LinearOperator::sample(kind, 12, 30, 1.5, 77);
    const auto c = LinearOperator::sample(kind, 12, 30, 1.5, 78);
    CHECK(a.dense() == b.dense());
    CHECK(a.dense() != c.dense());
  }
}

TEST_CASE("operator kinds parse and print") {
  for (auto kind : kAllKinds) CHECK(parse_operator_kind(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_operator_kind("fourier"), ConfigError);
}

TEST_CASE("gaussian-unit entry moments") {
  const Matrix a = LinearOperator::sample(OperatorKind::kGaussianUnit, 200, 200, 1.0, 1).dense();
  const double mean = a.mean();
  const double var = (a.array() - mean).square().mean();
  CHECK(std::abs(mean) <= 0.02);
  CHECK(std::abs(var - 1.0) <= 0.05);

  const Matrix b = LinearOperator::sample(OperatorKind::kGaussianOverN, 200, 400, 2.0, 1).dense();
  CHECK(std::abs(b.array().square().mean() - 4.0 / 400.0) <= 0.05 * 4.0 / 400.0);
}

TEST_CASE("rademacher entries have magnitude sigma_a") {
  const Matrix a = LinearOperator::sample(OperatorKind::kRademacher, 40, 60, 0.7, 5).dense();
  CHECK((a.cwiseAbs().array() == 0.7).all());
  const double frac = (a.array() > 0).cast<double>().mean();
  CHECK(std::abs(frac - 0.5) < 0.05);
}

TEST_CASE("partial dct selects distinct rows") {
  const auto op = LinearOperator::sample(OperatorKind::kPartialDct, 10, 32, 3.0, 9);
  const auto rows = op.row_indices();
  REQUIRE(rows.size() == 10);
  CHECK(std::is_sorted(rows.begin(), rows.end()));
  CHECK(std::set<Eigen::Index>(rows.begin(), rows.end()).size() == 10);
  CHECK(op.sigma_a() == 1.0);
  const Matrix full = dct_matrix(32);
  const Matrix a = op.dense();
  for (Eigen::Index i = 0; i < 10; ++i) CHECK((a.row(i) - full.row(rows[i])).norm() < 1e-12);
  CHECK_THROWS_AS(LinearOperator::sample(OperatorKind::kPartialDct, 33, 32, 1.0, 1), DimensionError);
}

TEST_CASE("sampling preconditions") {
  CHECK_THROWS(LinearOperator::sample(OperatorKind::kGaussianUnit, 0, 3, 1.0, 1));
  CHECK_THROWS(LinearOperator::sample(OperatorKind::kGaussianUnit, 3, 0, 1.0, 1));
  CHECK_THROWS(LinearOperator::sample(OperatorKind::kGaussianUnit, 3, 3, 0.0, 1));
}

TEST_CASE("apply and adjoint are linear and adjoint to each other") {
  SeededRng rng(21);
  for (auto kind : kAllKinds) {
    for (auto [m, n] : {std::pair<Eigen::Index, Eigen::Index>{7, 19}, {40, 64}, {64, 64}, {30, 100}}) {
      const auto op = LinearOperator::sample(kind, m, n, 1.3, rng.next_u64());
      CHECK(op.apply(Vector::Zero(n)).isZero());
      CHECK(op.adjoint(Vector::Zero(m)).isZero());
      const Matrix dense = op.dense();
      for (int probe = 0; probe < 10; ++probe) {
        const Vector x = rng.normal_vector(n);
        const Vector w = rng.normal_vector(n);
        const Vector y = rng.normal_vector(m);
        const double lhs = op.apply(x).dot(y);
        const double rhs = x.dot(op.adjoint(y));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
        const double a = rng.normal(), b = rng.normal();
        const Vector lin = op.apply(a * x + b * w) - (a * op.apply(x) + b * op.apply(w));
        CHECK(lin.norm() <= 1e-12 * std::max(1.0, op.apply(a * x + b * w).norm()));
        CHECK((op.apply(x) - dense * x).norm() <= 1e-10 * (1.0 + x.norm()));
      }
      CHECK_THROWS_AS(op.apply(Vector::Zero(n + 1)), DimensionError);
      CHECK_THROWS_AS(op.adjoint(Vector::Zero(m + 1)), DimensionError);
    }
  }
}

TEST_CASE("partial dct rows are orthonormal") {
  for (Eigen::Index m : {1, 17, 64}) {
    const auto op = LinearOperator::sample(OperatorKind::kPartialDct, m, 64, 1.0, 4);
    Matrix aat(m, m);
    for (Eigen::Index j = 0; j < m; ++j) aat.col(j) = op.apply(op.adjoint(Vector::Unit(m, j)));
    CHECK((aat - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-10);
  }
  const auto full = LinearOperator::sample(OperatorKind::kPartialDct, 64, 64, 1.0, 4);
  SeededRng rng(1);
  const Vector x = rng.normal_vector(64);
  CHECK((full.adjoint(full.apply(x)) - x).norm() <= 1e-10 * x.norm());
}

TEST_CASE("default step") {
  CHECK(LinearOperator::sample(OperatorKind::kGaussianUnit, 10, 20, 2.0, 1).default_step() ==
        doctest::Approx(1.0 / 40.0));
  CHECK(LinearOperator::sample(OperatorKind::kGaussianOverN, 10, 20, 2.0, 1).default_step() ==
        doctest::Approx(20.0 / 40.0));
  CHECK(LinearOperator::sample(OperatorKind::kPartialDct, 10, 20, 2.0, 1).default_step() ==
        doctest::Approx(2.0));
}

TEST_CASE("operator records regenerate the operator") {
  for (auto kind : kAllKinds) {
    const auto op = LinearOperator::sample(kind, 9, 21, 0.8, 1234);
    const auto back = LinearOperator::from_record(op.to_record());
    CHECK(back.kind() == kind);
    CHECK(back.rows() == 9);
    CHECK(back.cols() == 21);
    CHECK(back.seed() == 1234);
    CHECK(back.dense() == op.dense());
  }
  CHECK_THROWS(LinearOperator::from_record("{\"kind\":\"gaussian-unit\"}"));
  CHECK_THROWS(LinearOperator::from_dense(Matrix::Identity(3, 3)).to_record());
}

TEST_CASE("spectral norm") {
  const auto dct = LinearOperator::sample(OperatorKind::kPartialDct, 20, 64, 1.0, 2);
  CHECK(spectral_norm(dct).value == doctest::Approx(1.0).epsilon(1e-8));

  Matrix one(1, 1);
  one(0, 0) = -2.5;
  CHECK(spectral_norm(LinearOperator::from_dense(one)).value == doctest::Approx(2.5).epsilon(1e-14));

  for (std::uint64_t seed : {1, 2, 3}) {
    const auto op = LinearOperator::sample(OperatorKind::kGaussianUnit, 20, 50, 1.0, seed);
    const auto est = spectral_norm(op, 10000, 1e-14);
    const double truth = Eigen::JacobiSVD<Matrix>(op.dense()).singularValues()(0);
    CHECK(est.converged);
    CHECK(std::abs(est.value - truth) <= 1e-6);
    CHECK(est.value <= truth * (1.0 + 1e-12));
    CHECK(spectral_norm(op).value == spectral_norm(op).value);
  }
}

TEST_CASE("gaussian sigma_max tail at desk scale") {
  int hits = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const auto op = LinearOperator::sample(OperatorKind::kGaussianUnit, 20, 50, 1.0, derive_seed(99, "tail", t));
    if (spectral_norm(op, 2000, 1e-10).value >= 2.0 * std::sqrt(20.0) + std::sqrt(50.0)) ++hits;
  }
  CHECK(hits == 0);
}

TEST_CASE("noise injection hits the requested snr") {
  SeededRng rng(8);
  const Vector y = rng.normal_vector(50);
  const auto clean = add_noise_at_snr(y, NoiseSpec{});
  CHECK(clean.y == y);
  CHECK(clean.sigma_z == 0.0);
  for (double snr : {-5.0, 0.0, 10.0, 20.0, 37.5}) {
    const auto noisy = add_noise_at_snr(y, NoiseSpec{snr, 3});
    CHECK(measurement_snr(y, Vector(noisy.y - y)) == doctest::Approx(snr).epsilon(1e-12));
    CHECK((noisy.y - y - noisy.noise).norm() <= 1e-12 * y.norm());
  }
  const auto twenty = add_noise_at_snr(y, NoiseSpec{20.0, 3});
  CHECK(twenty.noise.norm() == doctest::Approx(y.norm() / 10.0).epsilon(1e-12));
  const auto again = add_noise_at_snr(y, NoiseSpec{20.0, 3});
  CHECK(again.y == twenty.y);
  CHECK_THROWS_AS(add_noise_at_snr(Vector::Zero(4), NoiseSpec{10.0, 1}), DegenerateInputError);
}
