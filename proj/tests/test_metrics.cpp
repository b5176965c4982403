#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cgd/io.hpp"
#include "cgd/metrics.hpp"
#include "cgd/rng.hpp"

using namespace cgd;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cgd_test_metrics_" + name);
}

}  // namespace

TEST_CASE("signal rejects empty and non-finite values") {
  CHECK_THROWS_AS(Signal{Vector()}, DimensionError);
  CHECK_THROWS_AS(Signal(vec({1.0, std::nan("")})), DomainError);
  CHECK_THROWS_AS(Signal(vec({std::numeric_limits<double>::infinity()})), DomainError);
  const Signal s(vec({1, 2, 3}));
  CHECK(s.size() == 3);
  CHECK(s[1] == 2.0);
}

TEST_CASE("mse examples") {
  const Vector x = vec({0.25, -1.5, 7.0});
  CHECK(mse(x, x) == 0.0);
  CHECK(mse(vec({0, 0}), vec({1, 1})) == doctest::Approx(1.0));
  CHECK(mse(vec({1, 2, 3}), vec({1, 2, 0})) == doctest::Approx(3.0));
  CHECK(mse(Signal(vec({1, 2, 3})), Signal(vec({1, 2, 0}))) == doctest::Approx(3.0));
  CHECK_THROWS_AS(mse(vec({1, 2}), vec({1})), DimensionError);
}

TEST_CASE("mse is symmetric and quadratic in scale") {
  SeededRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = rng.normal_vector(17);
    const Vector y = rng.normal_vector(17);
    const double a = rng.uniform(-3.0, 3.0);
    CHECK(mse(x, y) == doctest::Approx(mse(y, x)).epsilon(1e-14));
    CHECK(mse(Vector(a * x), Vector(a * y)) == doctest::Approx(a * a * mse(x, y)).epsilon(1e-12));
    CHECK(normalized_error(x, y) == doctest::Approx(std::sqrt(mse(x, y))).epsilon(1e-14));
  }
}

TEST_CASE("psnr examples") {
  CHECK(psnr(255.0 * 255.0) == doctest::Approx(0.0));
  CHECK(psnr(1.0) == doctest::Approx(48.1308).epsilon(1e-3 / 48.13));
  CHECK(psnr(4.0) == doctest::Approx(42.1103).epsilon(1e-3 / 42.11));
  CHECK(std::isinf(psnr(0.0)));
  CHECK(psnr(0.0) > 0);
  CHECK_THROWS_AS(psnr(-1e-12), DomainError);
  double prev = psnr(1e-6);
  for (double m = 2e-6; m < 1e6; m *= 1.7) {
    const double p = psnr(m);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("measurement snr examples") {
  CHECK(measurement_snr(vec({3, 4}), vec({0, 5})) == doctest::Approx(0.0));
  CHECK(measurement_snr(vec({10, 0}), vec({0, 1})) == doctest::Approx(20.0));
  CHECK(measurement_snr(vec({1, 0}), vec({0, 0})) == std::numeric_limits<double>::infinity());
  CHECK(measurement_snr(vec({0, 0}), vec({0, 1})) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(measurement_snr(vec({0, 0}), vec({0, 0})), DegenerateInputError);
}

TEST_CASE("normalized error examples") {
  CHECK(normalized_error(vec({1, 2}), vec({1, 2})) == 0.0);
  CHECK(normalized_error(vec({1, 1, 1, 1}), vec({0, 0, 0, 0})) == doctest::Approx(1.0));
  CHECK(normalized_error(vec({3}), vec({0})) == doctest::Approx(3.0));
  CHECK_THROWS_AS(normalized_error(vec({1}), vec({1, 2})), DimensionError);
}

TEST_CASE("quality report") {
  const auto q = quality_report(vec({1, 2, 3}), vec({1, 2, 0}), 30.0);
  CHECK(q.mse == doctest::Approx(3.0));
  CHECK(q.psnr_db == doctest::Approx(psnr(3.0)));
  CHECK(q.snr_db == 30.0);
  CHECK(q.normalized_error == doctest::Approx(std::sqrt(3.0)));
  const auto perfect = quality_report(vec({1, 2}), vec({1, 2}), 0.0);
  CHECK(perfect.mse == 0.0);
  CHECK(std::isinf(perfect.psnr_db));
}

TEST_CASE("rng streams are reproducible") {
  SeededRng a(0xdeadbeef), b(0xdeadbeef), c(0xdeadbeef + 1);
  bool differs = false;
  for (int i = 0; i < 10000; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    differs = differs || va != c.next_u64();
  }
  CHECK(differs);
  SeededRng d(5), e(5);
  for (int i = 0; i < 10000; ++i) {
    CHECK(d.normal() == e.normal());
    CHECK(d.uniform() == e.uniform());
  }
}

TEST_CASE("rng values are frozen") {
  // std::mt19937_64 with the default seed: the standard fixes the 10000th draw.
  std::mt19937_64 ref;
  ref.discard(9999);
  CHECK(ref() == 9981545732273789042ULL);
  SeededRng rng(5489);
  for (int i = 0; i < 9999; ++i) rng.next_u64();
  CHECK(rng.next_u64() == 9981545732273789042ULL);
  CHECK(SeededRng::algorithm() == "mt19937_64/u53/box-muller/splitmix64-derive");
}

TEST_CASE("rng distributions have the right moments") {
  SeededRng rng(42);
  const int n = 200000;
  double s = 0, s2 = 0, u = 0, sg = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
    const double v = rng.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    u += v;
    sg += rng.sign();
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(u / n - 0.5) < 0.005);
  CHECK(std::abs(sg / n) < 0.01);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  const Vector w = rng.unit_vector(9);
  CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("derived seeds separate streams") {
  CHECK(derive_seed(1, "operator", 0) != derive_seed(1, "operator", 1));
  CHECK(derive_seed(1, "operator", 0) != derive_seed(1, "noise", 0));
  CHECK(derive_seed(1, "operator", 0) != derive_seed(2, "operator", 0));
  CHECK(derive_seed(7, "x", 3) == derive_seed(7, "x", 3));
  CHECK(SeededRng(9).child("a", 2).seed() == derive_seed(9, "a", 2));
}

TEST_CASE("f64v round trip") {
  const auto path = temp_path("a.f64v");
  const Vector x = vec({0.0, -1.5, 1e-300, 3.14159, -0.0});
  io::write_f64v(path, x);
  const Vector y = io::read_f64v(path);
  CHECK(y == x);
  const auto bytes = io::read_bytes(path);
  REQUIRE(bytes.size() == 8 + 5 * 8);
  CHECK(bytes[0] == 5);
  for (int i = 1; i < 8; ++i) CHECK(bytes[static_cast<std::size_t>(i)] == 0);
  // -1.5 = 0xBFF8000000000000, little-endian.
  CHECK(bytes[16 + 7] == 0xBF);
  CHECK(bytes[16 + 6] == 0xF8);

  auto truncated = bytes;
  truncated.pop_back();
  io::write_bytes(path, truncated);
  CHECK_THROWS_AS(io::read_f64v(path), IoError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(io::read_f64v(path), IoError);
}

TEST_CASE("pgm round trip and scaling") {
  const auto path = temp_path("b.pgm");
  io::GrayImage img{3, 2, {0, 10, 20, 255, 128, 7}};
  io::write_pgm(path, img);
  const auto back = io::read_pgm(path);
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.pixels == img.pixels);

  std::ofstream(path, std::ios::binary) << "P5\n# comment\n2 1\n255\n" << '\x01' << '\x02';
  const auto commented = io::read_pgm(path);
  CHECK(commented.width == 2);
  CHECK(commented.pixels == std::vector<std::uint8_t>{1, 2});
  std::filesystem::remove(path);

  const Vector v = vec({0.0, 0.5, 1.0, -0.2, 2.0, 0.3333});
  const auto im = io::to_image(v, 3, 255.0);
  CHECK(im.pixels == std::vector<std::uint8_t>{0, 128, 255, 0, 255, 85});
  const Vector r = io::from_image(im, 255.0);
  for (Eigen::Index i : {0, 1, 2, 5}) CHECK(std::abs(r(i) - v(i)) <= 0.5 / 255.0 + 1e-15);
  CHECK_THROWS(io::to_image(v, 4, 255.0));
}
